#include "setzer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "setzer/errors.hpp"

namespace setzer {

namespace {

bool even_sign(const ScanRecord& r) {
  return r.cls == CurveClass::Star || r.cls == CurveClass::DoubleStar;
}

// Rows sorted by |u| for cumulative sweeps.
std::vector<const ScanRecord*> sorted_by_abs_u(
    const std::vector<ScanRecord>& rows) {
  std::vector<const ScanRecord*> ptr;
  ptr.reserve(rows.size());
  for (const auto& r : rows) ptr.push_back(&r);
  std::sort(ptr.begin(), ptr.end(), [](const ScanRecord* a,
                                       const ScanRecord* b) {
    return std::llabs(a->u) < std::llabs(b->u);
  });
  return ptr;
}

// Cumulative count of rows with |u| <= X satisfying pred, one value per
// grid point.
template <class Pred>
std::vector<u64> cumulative(const std::vector<const ScanRecord*>& sorted,
                            const std::vector<double>& grid, Pred pred) {
  std::vector<u64> out(grid.size(), 0);
  size_t i = 0;
  u64 count = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    while (i < sorted.size() &&
           static_cast<double>(std::llabs(sorted[i]->u)) <= grid[g]) {
      if (pred(*sorted[i])) ++count;
      ++i;
    }
    out[g] = count;
  }
  return out;
}

GridSeries counts_to_series(const std::string& label,
                            const std::vector<double>& grid,
                            const std::vector<u64>& counts) {
  GridSeries s;
  s.label = label;
  s.x = grid;
  s.y.reserve(counts.size());
  for (u64 c : counts) s.y.push_back(static_cast<double>(c));
  return s;
}

void require_rows(bool any, const char* where) {
  if (!any) throw SetzerError(Err::EmptyInput, std::string(where) +
                                                   ": no qualifying rows");
}

}  // namespace

std::vector<double> default_grid(const std::vector<ScanRecord>& rows,
                                 int points) {
  require_rows(!rows.empty(), "default_grid");
  double max_u = 0;
  for (const auto& r : rows)
    max_u = std::max(max_u, static_cast<double>(std::llabs(r.u)));
  double lo = std::min(1e3, max_u);
  if (points < 2 || max_u <= lo) return {max_u};
  std::vector<double> grid(points);
  double ratio = std::log(max_u / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(ratio * i);
  grid.back() = max_u;
  return grid;
}

std::vector<GridSeries> order_frequencies(const std::vector<ScanRecord>& rows,
                                          const std::vector<double>& grid,
                                          int k_max) {
  auto sorted = sorted_by_abs_u(rows);
  bool any = std::any_of(rows.begin(), rows.end(),
                         [](const ScanRecord& r) { return even_sign(r); });
  require_rows(any, "order_frequencies");

  std::vector<GridSeries> out;
  for (int i = 1; i <= 2; ++i) {
    auto counts = cumulative(sorted, grid, [i](const ScanRecord& r) {
      if (!even_sign(r) || !r.has_sha || r.is_zero) return false;
      return (i == 1 ? r.sha1 : r.sha2) == 1;
    });
    out.push_back(counts_to_series("f_" + std::to_string(i), grid, counts));
  }
  out.push_back(counts_to_series(
      "g", grid, cumulative(sorted, grid, [](const ScanRecord& r) {
        return even_sign(r) && r.has_sha && r.is_zero;
      })));
  for (int i = 1; i <= 2; ++i) {
    for (int k = 1; k <= k_max; ++k) {
      i64 target = static_cast<i64>(k) * k;
      auto counts =
          cumulative(sorted, grid, [i, target](const ScanRecord& r) {
            if (!even_sign(r) || !r.has_sha || r.is_zero) return false;
            return (i == 1 ? r.sha1 : r.sha2) == target;
          });
      out.push_back(counts_to_series(
          "fk_" + std::to_string(i) + "_" + std::to_string(k), grid, counts));
    }
  }
  return out;
}

std::vector<GridSeries> ratio_series(const std::vector<ScanRecord>& rows,
                                     const std::vector<double>& grid,
                                     int k_max) {
  auto base = order_frequencies(rows, grid, k_max);
  auto find = [&](const std::string& label) -> const GridSeries& {
    for (const auto& s : base)
      if (s.label == label) return s;
    throw SetzerError(Err::EmptyInput, "ratio_series: missing " + label);
  };
  const GridSeries& g = find("g");

  std::vector<GridSeries> out;
  auto ratio_of = [&](const std::string& label, const GridSeries& num,
                      const GridSeries& den) {
    GridSeries s;
    s.label = label;
    for (size_t j = 0; j < grid.size(); ++j) {
      if (den.y[j] <= 0) continue;  // missing point
      s.x.push_back(grid[j]);
      s.y.push_back(num.y[j] / den.y[j]);
    }
    out.push_back(std::move(s));
  };
  for (int i = 1; i <= 2; ++i)
    ratio_of("fg_" + std::to_string(i), find("f_" + std::to_string(i)), g);
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= k_max; ++k)
      ratio_of("F_" + std::to_string(i) + "_" + std::to_string(k),
               find("f_" + std::to_string(i)),
               find("fk_" + std::to_string(i) + "_" + std::to_string(k)));

  auto asymptotic = [&](const std::string& label, double power, double lexp) {
    GridSeries s;
    s.label = label;
    for (size_t j = 0; j < grid.size(); ++j) {
      if (g.y[j] <= 0 || grid[j] <= 1) continue;
      s.x.push_back(grid[j]);
      s.y.push_back(std::pow(grid[j], power) *
                    std::pow(std::log(grid[j]), lexp) / g.y[j]);
    }
    out.push_back(std::move(s));
  };
  asymptotic("H", 19.0 / 24.0, 3.0 / 8.0);
  asymptotic("G_0", 0.75, 0.0);
  asymptotic("G_12", 0.75, 0.5);
  asymptotic("G_1", 0.75, 1.0);
  return out;
}

std::vector<GridSeries> divisibility_series(
    const std::vector<ScanRecord>& rows, const std::vector<double>& grid,
    u64 p) {
  if (p < 2) throw SetzerError(Err::Usage, "divisibility_series: p >= 2");
  auto sorted = sorted_by_abs_u(rows);
  bool any = std::any_of(rows.begin(), rows.end(), [](const ScanRecord& r) {
    return even_sign(r) && r.has_sha && !r.is_zero;
  });
  require_rows(any, "divisibility_series");

  auto star_nonzero = [](const ScanRecord& r) {
    return r.cls == CurveClass::Star && r.has_sha && !r.is_zero;
  };
  auto even_nonzero = [](const ScanRecord& r) {
    return even_sign(r) && r.has_sha && !r.is_zero;
  };
  auto f_den = cumulative(sorted, grid, star_nonzero);
  auto g_den = cumulative(sorted, grid, even_nonzero);

  auto frequency = [&](const std::string& label,
                       const std::vector<u64>& num,
                       const std::vector<u64>& den) {
    GridSeries s;
    s.label = label;
    for (size_t j = 0; j < grid.size(); ++j) {
      if (den[j] == 0) continue;
      s.x.push_back(grid[j]);
      s.y.push_back(static_cast<double>(num[j]) /
                    static_cast<double>(den[j]));
    }
    return s;
  };

  const i64 pp = static_cast<i64>(p);
  std::vector<GridSeries> out;
  {
    auto num = cumulative(sorted, grid, [&](const ScanRecord& r) {
      return star_nonzero(r) && r.sha1 % pp == 0;
    });
    out.push_back(frequency("fp_" + std::to_string(p), num, f_den));
  }
  if (p == 2) {
    for (int i = 1; i <= 2; ++i) {
      auto num = cumulative(sorted, grid, [&](const ScanRecord& r) {
        return even_nonzero(r) && (i == 1 ? r.sha1 : r.sha2) % 2 == 0;
      });
      out.push_back(frequency("g2_" + std::to_string(i), num, g_den));
    }
  } else {
    // Odd divisibility is curve-independent: sha1 and sha2 share odd parts.
    auto num = cumulative(sorted, grid, [&](const ScanRecord& r) {
      return even_nonzero(r) && r.sha1 % pp == 0;
    });
    out.push_back(frequency("gp_" + std::to_string(p), num, g_den));
  }
  return out;
}

double cohen_lenstra_f0(u64 p, int j_max) {
  long double prod = 1.0L;
  long double pl = static_cast<long double>(p);
  for (int j = 1; j <= j_max; ++j) {
    long double term = powl(pl, 1.0L - 2.0L * j);
    prod *= (1.0L - term);
    if (term < 1e-12L) break;
  }
  return static_cast<double>(1.0L - prod);
}

std::vector<GridSeries> growth_series(const std::vector<ScanRecord>& rows,
                                      const std::vector<double>& grid) {
  auto sorted = sorted_by_abs_u(rows);
  bool any = std::any_of(rows.begin(), rows.end(), [](const ScanRecord& r) {
    return even_sign(r) && r.has_sha && !r.is_zero;
  });
  require_rows(any, "growth_series");

  struct Mean {
    std::vector<double> value;  // running mean at each grid point
    std::vector<u64> count;
  };
  auto running_mean = [&](auto pred, auto value_of) {
    Mean m;
    m.value.assign(grid.size(), 0.0);
    m.count.assign(grid.size(), 0);
    size_t i = 0;
    double sum = 0;
    u64 count = 0;
    for (size_t g = 0; g < grid.size(); ++g) {
      while (i < sorted.size() &&
             static_cast<double>(std::llabs(sorted[i]->u)) <= grid[g]) {
        if (pred(*sorted[i])) {
          sum += value_of(*sorted[i]);
          ++count;
        }
        ++i;
      }
      m.value[g] = count > 0 ? sum / static_cast<double>(count) : 0.0;
      m.count[g] = count;
    }
    return m;
  };

  std::vector<GridSeries> out;
  auto emit = [&](const std::string& label, const Mean& m, bool over_sqrt,
                  bool with_log = false) {
    GridSeries s;
    s.label = label;
    for (size_t j = 0; j < grid.size(); ++j) {
      if (m.count[j] == 0) continue;
      double v = m.value[j];
      if (over_sqrt) {
        if (grid[j] <= (with_log ? 1.0 : 0.0)) continue;
        v /= std::sqrt(grid[j]);
        if (with_log) v /= std::log(grid[j]);
      }
      s.x.push_back(grid[j]);
      s.y.push_back(v);
    }
    out.push_back(std::move(s));
  };

  auto star_nonzero = [](const ScanRecord& r) {
    return r.cls == CurveClass::Star && r.has_sha && !r.is_zero;
  };
  auto even_nonzero = [](const ScanRecord& r) {
    return even_sign(r) && r.has_sha && !r.is_zero;
  };
  Mean mstar = running_mean(star_nonzero, [](const ScanRecord& r) {
    return static_cast<double>(r.sha1);
  });
  emit("Mstar", mstar, false);
  emit("f_T", mstar, true);
  for (int i = 1; i <= 2; ++i) {
    Mean n = running_mean(even_nonzero, [i](const ScanRecord& r) {
      return static_cast<double>(i == 1 ? r.sha1 : r.sha2);
    });
    emit("Nstar_" + std::to_string(i), n, false);
    emit("g_T_" + std::to_string(i), n, true);
  }
  return out;
}

std::vector<GridSeries> rank_one_series(const std::vector<ScanRecord>& rows,
                                        const std::vector<double>& grid) {
  auto sorted = sorted_by_abs_u(rows);
  bool any = std::any_of(rows.begin(), rows.end(), [](const ScanRecord& r) {
    return r.cls == CurveClass::EvenK && r.has_sha_reg1;
  });
  require_rows(any, "rank_one_series");

  GridSeries t_series, u_series;
  t_series.label = "T_X";
  u_series.label = "u_X";
  size_t i = 0;
  double sum = 0;
  u64 count = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    while (i < sorted.size() &&
           static_cast<double>(std::llabs(sorted[i]->u)) <= grid[g]) {
      const ScanRecord& r = *sorted[i];
      if (r.cls == CurveClass::EvenK && r.has_sha_reg1) {
        sum += r.sha_reg1;
        ++count;
      }
      ++i;
    }
    if (count == 0) continue;
    double t = sum / static_cast<double>(count);
    t_series.x.push_back(grid[g]);
    t_series.y.push_back(t);
    if (grid[g] > 1.0) {
      u_series.x.push_back(grid[g]);
      u_series.y.push_back(t / (std::sqrt(grid[g]) * std::log(grid[g])));
    }
  }
  return {t_series, u_series};
}

HistogramSpec HistogramSpec::for_target(HistTarget t) {
  HistogramSpec spec;
  spec.target = t;
  switch (t) {
    case HistTarget::LValue:
    case HistTarget::Sha1:
      spec.mu = -0.5;
      spec.sigma_sq = 1.0;
      break;
    case HistTarget::Sha2:
      spec.mu = -0.5 - std::log(2.0);
      spec.sigma_sq = 1.0 + std::log(2.0) * std::log(2.0);
      break;
  }
  return spec;
}

HistogramResult histogram(const std::vector<ScanRecord>& rows,
                          const HistogramSpec& spec) {
  HistogramResult h;
  h.spec = spec;
  size_t bins = static_cast<size_t>(
      std::llround((spec.bin_high - spec.bin_low) / spec.bin_width));
  h.counts.assign(bins, 0);

  double sum = 0, sum_sq = 0;
  for (const auto& r : rows) {
    if (!even_sign(r) || !r.has_sha || r.is_zero) continue;
    i64 abs_u = std::llabs(r.u);
    if (abs_u < 16) continue;  // loglog must be positive
    double v = 0;
    switch (spec.target) {
      case HistTarget::LValue:
        if (r.lvalue <= 0) continue;
        v = std::log(r.lvalue);
        break;
      case HistTarget::Sha1:
        if (r.sha1 <= 0) continue;
        v = std::log(static_cast<double>(r.sha1) /
                     std::sqrt(static_cast<double>(abs_u)));
        break;
      case HistTarget::Sha2:
        if (r.sha2 <= 0) continue;
        v = std::log(static_cast<double>(r.sha2) /
                     std::sqrt(static_cast<double>(abs_u)));
        break;
    }
    double ll = std::log(std::log(static_cast<double>(abs_u)));
    double z = (v - spec.mu * ll) / std::sqrt(spec.sigma_sq * ll);
    ++h.total;
    sum += z;
    sum_sq += z * z;
    if (z < spec.bin_low) {
      ++h.under;
    } else if (z >= spec.bin_high) {
      ++h.over;
    } else {
      size_t idx = static_cast<size_t>((z - spec.bin_low) / spec.bin_width);
      if (idx >= bins) idx = bins - 1;  // right edge round-off
      ++h.counts[idx];
    }
  }
  require_rows(h.total > 0, "histogram");
  h.sample_mean = sum / static_cast<double>(h.total);
  h.sample_variance =
      sum_sq / static_cast<double>(h.total) - h.sample_mean * h.sample_mean;
  return h;
}

void write_series_tsv(const std::string& dir,
                      const std::vector<GridSeries>& series) {
  std::filesystem::create_directories(dir);
  for (const auto& s : series) {
    std::string path = dir + "/" + s.label + ".tsv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SetzerError(Err::Io, "cannot write " + path);
    for (size_t i = 0; i < s.x.size(); ++i)
      out << format_real(s.x[i]) << '\t' << format_real(s.y[i]) << '\n';
    if (!out) throw SetzerError(Err::Io, "write failed on " + path);
  }
}

void write_histogram_tsv(const std::string& path, const HistogramResult& h) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SetzerError(Err::Io, "cannot write " + path);
  double denom = static_cast<double>(h.total) * h.spec.bin_width;
  out << "-inf\t" << format_real(h.spec.bin_low) << '\t' << h.under << '\t'
      << format_real(static_cast<double>(h.under) / denom) << '\n';
  for (size_t i = 0; i < h.counts.size(); ++i) {
    double lo = h.spec.bin_low + static_cast<double>(i) * h.spec.bin_width;
    out << format_real(lo) << '\t' << format_real(lo + h.spec.bin_width)
        << '\t' << h.counts[i] << '\t'
        << format_real(static_cast<double>(h.counts[i]) / denom) << '\n';
  }
  out << format_real(h.spec.bin_high) << "\tinf\t" << h.over << '\t'
      << format_real(static_cast<double>(h.over) / denom) << '\n';
  if (!out) throw SetzerError(Err::Io, "write failed on " + path);
}

}  // namespace setzer
