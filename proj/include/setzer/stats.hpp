#pragma once

// Reducers from a scan file to plot-ready series: cumulative order
// frequencies and their ratios, divisibility frequencies against the
// Cohen-Lenstra prediction, growth means, the rank-one average, and the
// normalized histograms of log L and log(|Sha|/sqrt|u|).

#include <string>
#include <vector>

#include "setzer/records.hpp"

namespace setzer {

struct GridSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // points with undefined values are omitted
};

// 50 log-spaced points from 1e3 (or the smallest |u|) to the scan maximum.
std::vector<double> default_grid(const std::vector<ScanRecord>& rows,
                                 int points = 50);

// f_1, f_2 (order one counts), g (zero count), fk_i_k (order k^2 counts),
// cumulative over |u| <= X. Even-sign rows only.
std::vector<GridSeries> order_frequencies(const std::vector<ScanRecord>& rows,
                                          const std::vector<double>& grid,
                                          int k_max = 7);

// fg_i = f_i/g, F_i_k = f_i/fk_i_k, H = X^(19/24) (ln X)^(3/8) / g,
// G_j = X^(3/4) (ln X)^j / g for j in {0, 1/2, 1}.
std::vector<GridSeries> ratio_series(const std::vector<ScanRecord>& rows,
                                     const std::vector<double>& grid,
                                     int k_max = 7);

// Divisibility frequencies for one prime: fp_p on the prime-conductor
// population; gp_p (odd p) or g2_1/g2_2 (p = 2) on the full even-sign
// population.
std::vector<GridSeries> divisibility_series(
    const std::vector<ScanRecord>& rows, const std::vector<double>& grid,
    u64 p);

// 1 - prod_{j>=1} (1 - p^(1-2j)), converged at 1e-12.
double cohen_lenstra_f0(u64 p, int j_max = 256);

// Mstar (mean order, prime conductors), f_T = Mstar/sqrt(T), Nstar_i and
// g_T_i likewise on the full even-sign population.
std::vector<GridSeries> growth_series(const std::vector<ScanRecord>& rows,
                                      const std::vector<double>& grid);

// T_X (mean of 2L'/Omega over the odd-sign population), u_X = T/(sqrt(X) ln X).
std::vector<GridSeries> rank_one_series(const std::vector<ScanRecord>& rows,
                                        const std::vector<double>& grid);

enum class HistTarget { LValue, Sha1, Sha2 };

struct HistogramSpec {
  double bin_low = -10.0;
  double bin_high = 10.0;
  double bin_width = 0.1;
  double mu = -0.5;
  double sigma_sq = 1.0;
  HistTarget target = HistTarget::LValue;

  static HistogramSpec for_target(HistTarget t);
};

struct HistogramResult {
  HistogramSpec spec;
  std::vector<u64> counts;  // bins [bin_low + i*w, bin_low + (i+1)*w)
  u64 under = 0, over = 0;  // outside [bin_low, bin_high)
  u64 total = 0;
  double sample_mean = 0;
  double sample_variance = 0;
};

// Normalized values (v - mu loglog|u|) / sqrt(sigma_sq loglog|u|) with
// v = log L(1) or log(sha_i / sqrt|u|); non-zero rows with |u| >= 16.
HistogramResult histogram(const std::vector<ScanRecord>& rows,
                          const HistogramSpec& spec);

void write_series_tsv(const std::string& dir,
                      const std::vector<GridSeries>& series);
void write_histogram_tsv(const std::string& path, const HistogramResult& h);

}  // namespace setzer
