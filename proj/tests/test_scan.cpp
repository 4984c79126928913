#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "setzer/errors.hpp"
#include "setzer/scan.hpp"

using namespace setzer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "setzer_scan_tests";
  fs::create_directories(dir);
  return dir;
}

ScanConfig base_config(const std::string& name, i64 lo, i64 hi) {
  ScanConfig c;
  c.u_min = lo;
  c.u_max = hi;
  c.include_evenk = true;
  c.out_path = (work_dir() / name).string();
  fs::remove(c.out_path);
  return c;
}

}  // namespace

TEST_CASE("record CSV round trip") {
  ScanRecord rec;
  rec.u = -51;
  rec.n = 2665;
  rec.k = 3;
  rec.factors = {5, 13, 41};
  rec.cls = CurveClass::DoubleStar;
  rec.epsilon = 1;
  rec.terms = 200;
  rec.lvalue = 1.75163296813606;
  rec.tail_bound = 1e-10;
  rec.omega = 0.875816484068031;
  rec.has_sha = true;
  rec.raw1 = 3.9999999999985;
  rec.raw2 = 0.999999999999625;
  rec.sha1 = 4;
  rec.sha2 = 1;
  rec.is_zero = false;
  rec.square1 = true;
  rec.square2 = true;
  rec.certified = {};

  std::string line = format_record(rec);
  ScanRecord back = parse_record(line);
  CHECK(back.u == rec.u);
  CHECK(back.n == rec.n);
  CHECK(back.factors == rec.factors);
  CHECK(back.cls == rec.cls);
  CHECK(back.sha1 == rec.sha1);
  CHECK(back.sha2 == rec.sha2);
  CHECK(back.has_sha);
  CHECK_FALSE(back.has_sha_reg1);
  CHECK(back.lvalue == rec.lvalue);  // 15 digits round-trips a double here
  CHECK(format_record(back) == line);

  CHECK_THROWS_AS(parse_record("1,2,3"), SetzerError);
}

TEST_CASE("scan of a tiny range produces the expected rows") {
  auto config = base_config("tiny.csv", 1, 100);
  ScanSummary s = scan(config);
  // Direct enumeration oracle.
  u64 accepted = 0, rejected = 0;
  for (i64 u = 1; u <= 100; ++u) {
    if (((u % 4) + 4) % 4 != 1) {
      ++rejected;
      continue;
    }
    auto p = classify(u);
    if (p.accepted()) ++accepted;
    else ++rejected;
  }
  CHECK(s.processed == accepted);
  CHECK(s.rejected == rejected);
  CHECK(s.anomalies == 0);

  auto rows = read_scan_csv(config.out_path);
  REQUIRE(rows.size() == accepted);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].u < rows[i].u);
  for (const auto& r : rows) {
    CHECK(r.n == static_cast<u128>(r.u) * r.u + 64);
    CHECK((r.has_sha != r.has_sha_reg1));
    if (r.has_sha) {
      CHECK(r.epsilon == 1);
      if (!r.is_zero) {
        CHECK(r.raw1 == doctest::Approx(std::ldexp(r.raw2, r.k - 1)));
        CHECK(r.square1);
        CHECK(r.square2);
      }
    } else {
      CHECK(r.epsilon == -1);
    }
  }
}

TEST_CASE("scan [3,3] rejects the lone non-residue") {
  auto config = base_config("u3.csv", 3, 3);
  ScanSummary s = scan(config);
  CHECK(s.processed == 0);
  CHECK(s.rejected == 1);
  auto rows = read_scan_csv(config.out_path);
  CHECK(rows.empty());
  CHECK(slurp(config.out_path).find("#checkpoint 3") != std::string::npos);
}

TEST_CASE("serial reference and OpenMP scans are byte-identical") {
  auto c1 = base_config("serial.csv", -500, 500);
  scan_serial(c1);
  auto c2 = base_config("parallel.csv", -500, 500);
  c2.workers = 3;
  scan(c2);
  CHECK(slurp(c1.out_path) == slurp(c2.out_path));
  CHECK(slurp(c1.out_path).size() > 1000);
}

TEST_CASE("rerunning a completed scan is a byte-identical no-op") {
  auto config = base_config("rerun.csv", 1, 200);
  ScanSummary first = scan(config);
  CHECK(first.processed > 0);
  std::string before = slurp(config.out_path);
  ScanSummary second = scan(config);
  CHECK(second.processed == 0);
  CHECK(slurp(config.out_path) == before);
}

TEST_CASE("a scan split across two runs matches a single run") {
  auto whole = base_config("whole.csv", -300, 300);
  scan(whole);
  auto split = base_config("split.csv", -300, 0);
  scan(split);
  ScanConfig second = split;
  second.u_min = -300;
  second.u_max = 300;
  scan(second);
  CHECK(slurp(whole.out_path) == slurp(split.out_path));
}

TEST_CASE("resume states") {
  SUBCASE("fresh header-only file") {
    auto config = base_config("fresh.csv", 1, 1);
    std::ofstream out(config.out_path);
    out << kCsvHeader << '\n';
    out.close();
    auto st = resume(config.out_path);
    CHECK(st.fresh);
    CHECK(st.rows == 0);
  }
  SUBCASE("full file reports the checkpoint") {
    auto config = base_config("full.csv", 1, 100);
    scan(config);
    auto st = resume(config.out_path);
    CHECK_FALSE(st.fresh);
    CHECK(st.has_checkpoint);
    CHECK(st.checkpoint_u == 100);
    CHECK(st.rows > 0);
  }
  SUBCASE("truncated trailing record is discarded") {
    auto config = base_config("trunc.csv", 1, 100);
    scan(config);
    auto rows_before = read_scan_csv(config.out_path).size();
    std::string content = slurp(config.out_path);
    // chop the footer plus the tail of the last record
    size_t cut = content.rfind("#checkpoint");
    content.resize(cut - 10);
    std::ofstream out(config.out_path, std::ios::trunc | std::ios::binary);
    out << content;
    out.close();
    auto st = resume(config.out_path);
    CHECK_FALSE(st.intact);
    CHECK(st.rows == rows_before - 1);
    // scanning again completes the file identically to a clean run
    ScanConfig again = config;
    scan(again);
    auto clean = base_config("trunc_clean.csv", 1, 100);
    scan(clean);
    CHECK(slurp(config.out_path) == slurp(clean.out_path));
  }
  SUBCASE("malformed trailer") {
    auto config = base_config("badfoot.csv", 1, 100);
    scan(config);
    std::string content = slurp(config.out_path);
    size_t cut = content.rfind("#checkpoint");
    content.resize(cut);
    content += "#checkpoint zzz\n";
    std::ofstream out(config.out_path, std::ios::trunc | std::ios::binary);
    out << content;
    out.close();
    CHECK_THROWS_AS(resume(config.out_path), SetzerError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(resume((work_dir() / "nope.csv").string()), SetzerError);
  }
}

TEST_CASE("scan with cache disabled matches the cached scan") {
  // Exercised through the library: compute_record with and without cache.
  ApCache cache(64 << 20);
  EvalOptions opts;
  for (i64 u = 1; u <= 2000; u += 4) {
    auto params = classify(u);
    if (!params.accepted()) continue;
    ScanRecord with_cache = compute_record(params, opts, false, &cache);
    ScanRecord without = compute_record(params, opts, false, nullptr);
    CHECK(format_record(with_cache) == format_record(without));
  }
}

TEST_CASE("star-only scans classify by primality alone") {
  auto all = base_config("staronly_a.csv", 1, 400);
  all.include_doublestar = false;
  all.include_evenk = false;
  scan(all);
  auto rows = read_scan_csv(all.out_path);
  for (const auto& r : rows) CHECK(r.cls == CurveClass::Star);
  // same rows as filtering a full scan
  auto full = base_config("staronly_b.csv", 1, 400);
  scan(full);
  auto full_rows = read_scan_csv(full.out_path);
  size_t stars = 0;
  for (const auto& r : full_rows)
    if (r.cls == CurveClass::Star) ++stars;
  CHECK(rows.size() == stars);
}
