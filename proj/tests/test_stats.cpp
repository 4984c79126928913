#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "setzer/errors.hpp"
#include "setzer/stats.hpp"

using namespace setzer;

namespace {

ScanRecord sha_row(i64 u, i64 sha1, i64 sha2, int k, CurveClass cls,
                   double lvalue = 1.0, bool zero = false) {
  ScanRecord r;
  r.u = u;
  r.n = static_cast<u128>(static_cast<i128>(u) * u) + 64;
  r.k = k;
  r.cls = cls;
  r.epsilon = 1;
  r.has_sha = true;
  r.sha1 = sha1;
  r.sha2 = sha2;
  r.raw1 = static_cast<double>(sha1);
  r.raw2 = static_cast<double>(sha2);
  r.is_zero = zero;
  r.lvalue = lvalue;
  return r;
}

ScanRecord rankone_row(i64 u, double value) {
  ScanRecord r;
  r.u = u;
  r.cls = CurveClass::EvenK;
  r.epsilon = -1;
  r.has_sha_reg1 = true;
  r.sha_reg1 = value;
  r.lvalue = value / 2;
  return r;
}

const GridSeries& find(const std::vector<GridSeries>& all,
                       const std::string& label) {
  for (const auto& s : all)
    if (s.label == label) return s;
  REQUIRE(false);
  return all.front();
}

}  // namespace

TEST_CASE("order frequencies partition the population") {
  std::vector<ScanRecord> rows;
  std::mt19937_64 rng(11);
  const int k_max = 7;
  for (int i = 0; i < 500; ++i) {
    i64 u = 17 + 4 * static_cast<i64>(rng() % 5000);
    if (rng() % 10 == 0) {
      rows.push_back(sha_row(u, 0, 0, 1, CurveClass::Star, 0.0, true));
    } else {
      i64 root = 1 + static_cast<i64>(rng() % 7);
      rows.push_back(sha_row(u, root * root, root * root, 1,
                             rng() % 2 ? CurveClass::Star
                                       : CurveClass::DoubleStar));
    }
  }
  std::vector<double> grid = {100, 2500, 10000, 21000};
  auto series = order_frequencies(rows, grid, k_max);
  const auto& g = find(series, "g");
  for (size_t j = 0; j < grid.size(); ++j) {
    double total_rows = 0;
    for (const auto& r : rows)
      if (std::llabs(r.u) <= grid[j]) total_rows += 1;
    double sum = g.y[j];
    for (int k = 1; k <= k_max; ++k) sum += find(series, "fk_1_" + std::to_string(k)).y[j];
    CHECK(sum == doctest::Approx(total_rows));
  }
  // f_1 equals fk at k=1
  CHECK(find(series, "f_1").y == find(series, "fk_1_1").y);

  // shuffle invariance
  auto shuffled = rows;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto series2 = order_frequencies(shuffled, grid, k_max);
  CHECK(find(series2, "g").y == g.y);
  CHECK(find(series2, "f_2").y == find(series, "f_2").y);
}

TEST_CASE("grid points below the smallest |u| count nothing") {
  std::vector<ScanRecord> rows = {sha_row(401, 1, 1, 1, CurveClass::Star)};
  std::vector<double> grid = {100, 500};
  auto series = order_frequencies(rows, grid);
  CHECK(find(series, "f_1").y[0] == 0);
  CHECK(find(series, "f_1").y[1] == 1);
}

TEST_CASE("ratio series identities") {
  std::vector<ScanRecord> rows;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    i64 u = 17 + 4 * static_cast<i64>(rng() % 3000);
    if (i % 5 == 0)
      rows.push_back(sha_row(u, 0, 0, 1, CurveClass::Star, 0.0, true));
    else
      rows.push_back(sha_row(u, 1, 1, 1, CurveClass::Star));
  }
  std::vector<double> grid = {10, 3000, 13000};
  auto series = ratio_series(rows, grid);
  const auto& f11 = find(series, "F_1_1");
  for (double v : f11.y) CHECK(v == doctest::Approx(1.0));
  const auto& h = find(series, "H");
  for (double v : h.y) CHECK(v > 0);
  // H skips the g = 0 grid point at X = 10 (smallest synthetic |u| is 17)
  CHECK(h.x.front() > 10);
}

TEST_CASE("divisibility series and the odd-prime curve independence") {
  std::vector<ScanRecord> rows;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 400; ++i) {
    i64 u = 17 + 4 * static_cast<i64>(rng() % 4000);
    i64 root = 1 + static_cast<i64>(rng() % 6);
    i64 s1 = root * root;
    bool star = rng() % 3 != 0;
    // doublestar rows carry sha1 = 4 * sha2 (k = 3)
    rows.push_back(star ? sha_row(u, s1, s1, 1, CurveClass::Star)
                        : sha_row(u, 4 * s1, s1, 3, CurveClass::DoubleStar));
  }
  std::vector<double> grid = {4000, 16100};
  auto d3 = divisibility_series(rows, grid, 3);
  const auto& fp3 = find(d3, "fp_3");
  const auto& gp3 = find(d3, "gp_3");
  // recompute directly
  for (size_t j = 0; j < grid.size(); ++j) {
    double div_star = 0, tot_star = 0, div_all1 = 0, div_all2 = 0, tot = 0;
    for (const auto& r : rows) {
      if (std::llabs(r.u) > grid[j]) continue;
      tot += 1;
      if (r.sha1 % 3 == 0) div_all1 += 1;
      if (r.sha2 % 3 == 0) div_all2 += 1;
      if (r.cls == CurveClass::Star) {
        tot_star += 1;
        if (r.sha1 % 3 == 0) div_star += 1;
      }
    }
    CHECK(fp3.y[j] == doctest::Approx(div_star / tot_star));
    CHECK(gp3.y[j] == doctest::Approx(div_all1 / tot));
    CHECK(div_all1 == div_all2);  // odd-part equality
  }
  auto d2 = divisibility_series(rows, grid, 2);
  const auto& g21 = find(d2, "g2_1");
  const auto& g22 = find(d2, "g2_2");
  CHECK(g21.y.back() >= g22.y.back());  // k = 3 rows force 4 | sha1
}

TEST_CASE("cohen lenstra constants") {
  // Converged products (mpmath cross-check to 15 digits). The tabulated
  // p = 5 reference rounds badly (0.206660 for 0.20666452...), so it gets
  // a 5e-6 allowance; the rest match their printed precision.
  CHECK(cohen_lenstra_f0(2) ==
        doctest::Approx(0.580577558204892).epsilon(1e-12));
  CHECK(cohen_lenstra_f0(3) ==
        doctest::Approx(0.360995423362522).epsilon(1e-12));
  CHECK(cohen_lenstra_f0(5) ==
        doctest::Approx(0.206664529941882).epsilon(1e-12));
  CHECK(cohen_lenstra_f0(7) ==
        doctest::Approx(0.145408011419038).epsilon(1e-12));
  CHECK(std::fabs(cohen_lenstra_f0(2) - 0.580577) < 1e-6);
  CHECK(std::fabs(cohen_lenstra_f0(3) - 0.360995) < 1e-6);
  CHECK(std::fabs(cohen_lenstra_f0(5) - 0.206660) < 5e-6);
  CHECK(std::fabs(cohen_lenstra_f0(7) - 0.145408) < 1e-6);
  CHECK(std::fabs(cohen_lenstra_f0(11) - 0.092) < 5e-4);
  double prev = 1.0;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 101ull}) {
    double v = cohen_lenstra_f0(p);
    CHECK(v > 0);
    CHECK(v < 1);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("growth series single-record example") {
  std::vector<ScanRecord> rows = {sha_row(100 + 1, 4, 4, 1, CurveClass::Star)};
  rows[0].u = 101;  // |u| = 101 <= 101
  std::vector<double> grid = {101};
  auto series = growth_series(rows, grid);
  CHECK(find(series, "Mstar").y[0] == doctest::Approx(4.0));
  CHECK(find(series, "f_T").y[0] == doctest::Approx(4.0 / std::sqrt(101.0)));
}

TEST_CASE("rank one series single-record example") {
  std::vector<ScanRecord> rows = {rankone_row(9, 3.0)};
  std::vector<double> grid = {10, 100};
  auto series = rank_one_series(rows, grid);
  CHECK(find(series, "T_X").y[0] == doctest::Approx(3.0));
  const auto& u_x = find(series, "u_X");
  CHECK(u_x.y[0] ==
        doctest::Approx(3.0 / (std::sqrt(10.0) * std::log(10.0))));
  CHECK(u_x.y[1] > 0);
}

TEST_CASE("histogram normalization, bins, and mass") {
  // L = 1 at loglog|u| = 1 lands at z = 0.5 in bin [0.5, 0.6).
  double target_u = std::exp(std::exp(1.0));  // loglog = 1
  i64 u_int = static_cast<i64>(std::llround(target_u));  // 15.15 -> 15
  // 15 < 16 is excluded; use a synthetic row at exactly loglog = 1 via 16?
  // loglog(16) = 1.0197: z = 0.5 * 1.0197 / sqrt(1.0197) = 0.5049 -> same bin
  (void)u_int;
  std::vector<ScanRecord> rows = {sha_row(17, 1, 1, 1, CurveClass::Star)};
  auto spec = HistogramSpec::for_target(HistTarget::LValue);
  auto h = histogram(rows, spec);
  double ll = std::log(std::log(17.0));
  double z = (0.0 + 0.5 * ll) / std::sqrt(ll);
  size_t expected_bin = static_cast<size_t>((z + 10.0) / 0.1);
  CHECK(h.counts[expected_bin] == 1);
  CHECK(h.total == 1);

  // sha2 spec constants
  auto s2 = HistogramSpec::for_target(HistTarget::Sha2);
  CHECK(s2.mu == doctest::Approx(-0.5 - std::log(2.0)));
  CHECK(s2.sigma_sq == doctest::Approx(1.0 + std::pow(std::log(2.0), 2)));

  // mass including overflow, |u| < 16 excluded
  std::vector<ScanRecord> many;
  std::mt19937_64 rng(19);
  for (int i = 0; i < 300; ++i) {
    i64 u = 13 + 4 * static_cast<i64>(rng() % 2000);
    double lv = std::exp(static_cast<double>(rng() % 200) - 100.0);  // huge spread
    many.push_back(sha_row(u, 1, 1, 1, CurveClass::Star, lv));
  }
  auto h2 = histogram(many, spec);
  u64 mass = h2.under + h2.over;
  for (u64 c : h2.counts) mass += c;
  CHECK(mass == h2.total);
  u64 eligible = 0;
  for (const auto& r : many)
    if (std::llabs(r.u) >= 16) ++eligible;
  CHECK(h2.total == eligible);
  CHECK(h2.over + h2.under > 0);  // the spread guarantees overflow

  // zero rows are excluded
  std::vector<ScanRecord> zeros = {sha_row(17, 0, 0, 1, CurveClass::Star,
                                           0.0, true)};
  CHECK_THROWS_AS(histogram(zeros, spec), SetzerError);
}

TEST_CASE("default grid is ascending and capped") {
  std::vector<ScanRecord> rows = {sha_row(25000 + 1, 1, 1, 1,
                                          CurveClass::Star)};
  rows[0].u = 24001;
  auto grid = default_grid(rows);
  REQUIRE(grid.size() == 50);
  CHECK(grid.front() == doctest::Approx(1000.0));
  CHECK(grid.back() == doctest::Approx(24001.0));
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("empty input raises") {
  std::vector<ScanRecord> none;
  std::vector<double> grid = {100};
  CHECK_THROWS_AS(order_frequencies(none, grid), SetzerError);
  CHECK_THROWS_AS(growth_series(none, grid), SetzerError);
  CHECK_THROWS_AS(rank_one_series(none, grid), SetzerError);
  CHECK_THROWS_AS(default_grid(none), SetzerError);
}
