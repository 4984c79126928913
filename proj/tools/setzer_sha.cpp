// Command-line surface: range scans, single-curve reports, statistics
// reduction, histograms, and spot re-verification of scan files.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
// mismatch.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "setzer/bsd.hpp"
#include "setzer/errors.hpp"
#include "setzer/periods.hpp"
#include "setzer/scan.hpp"
#include "setzer/stats.hpp"

namespace {

using namespace setzer;

int exit_code_for(const SetzerError& e) {
  switch (e.code()) {
    case Err::Usage:
    case Err::BadResidue:
    case Err::WrongSign:
      return 1;
    default:
      return 2;
  }
}

std::size_t cache_budget_mb() {
  if (const char* env = std::getenv("SETZER_SHA_CACHE_MB")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 256;
}

void apply_classes(const std::string& classes, ScanConfig& config) {
  config.include_star = false;
  config.include_doublestar = false;
  config.include_evenk = false;
  size_t pos = 0;
  while (pos <= classes.size()) {
    size_t next = classes.find(',', pos);
    if (next == std::string::npos) next = classes.size();
    std::string token = classes.substr(pos, next - pos);
    if (token == "star") {
      config.include_star = true;
    } else if (token == "doublestar") {
      config.include_doublestar = true;
    } else if (token == "evenk") {
      config.include_evenk = true;
    } else if (!token.empty()) {
      throw SetzerError(Err::Usage, "unknown class: " + token);
    }
    pos = next + 1;
  }
  if (!config.include_star && !config.include_doublestar &&
      !config.include_evenk)
    throw SetzerError(Err::Usage, "no classes selected");
}

int cmd_scan(const ScanConfig& config) {
  ScanSummary s = scan(config);
  std::cout << "processed " << s.processed << " rejected " << s.rejected
            << " zeros " << s.zeros << " anomalies " << s.anomalies << '\n';
  return 0;
}

void print_model(const WeierstrassModel& m) {
  std::cout << "  E" << m.index << ": a = (" << m.a1 << "," << m.a2 << ","
            << m.a3 << "," << m.a4 << "," << m.a6
            << "), disc = " << arith::to_string(m.discriminant) << '\n';
}

int cmd_curve(i64 u) {
  CurveParams params = classify(u);
  std::cout << "u: " << u << '\n';
  std::cout << "N: " << arith::to_string(params.n) << '\n';
  if (params.reason == RejectReason::BadResidue) {
    std::cout << "class: rejected (u is not 1 mod 4)\n";
    return 1;
  }
  std::cout << "factors:";
  for (size_t i = 0; i < params.factorization.primes.size(); ++i) {
    std::cout << ' ' << arith::to_string(params.factorization.primes[i]);
    if (params.factorization.exponents[i] > 1)
      std::cout << '^' << params.factorization.exponents[i];
  }
  std::cout << '\n';
  std::cout << "k: " << params.k << '\n';
  if (params.reason == RejectReason::NotSquarefree) {
    std::cout << "class: rejected (conductor is not squarefree)\n";
    return 0;
  }
  std::cout << "class: " << class_name(params.cls) << '\n';
  std::cout << "epsilon: " << (params.epsilon > 0 ? "+1" : "-1") << '\n';

  CurveInvariants inv = invariants(params);
  print_model(model(u, 1));
  print_model(model(u, 2));
  std::cout << "torsion order: " << inv.torsion_order << '\n';
  std::cout << "tamagawa: C_fin(E1) = " << inv.cfin1
            << ", C_fin(E2) = " << inv.cfin2 << '\n';
  std::cout << "rank bound: " << inv.rank_bound << '\n';
  std::cout << "two torsion check: "
            << (verify_two_torsion(u, 1) && verify_two_torsion(u, 2)
                    ? "ok"
                    : "FAILED")
            << '\n';

  PeriodResult period = real_period(u);
  std::cout << "omega: " << format_real(period.omega) << '\n';

  ApCache cache(cache_budget_mb() << 20);
  EvalOptions opts;
  if (params.cls == CurveClass::EvenK) {
    RankOneResult r = rank_one_product(params, opts, &cache);
    std::cout << "L'(1): " << format_real(r.lprime) << " (terms "
              << r.terms_used << ", tail " << format_real(r.tail_bound)
              << ")\n";
    std::cout << "sha_reg1 = 2L'/omega: " << format_real(r.sha_times_reg1)
              << '\n';
    return 0;
  }
  ShaResult sha = analytic_sha(params, opts, &cache);
  std::cout << "L(1): " << format_real(sha.lvalue) << " (terms "
            << sha.terms_used << ", tail " << format_real(sha.tail_bound)
            << ")\n";
  std::cout << "raw sha: E1 " << format_real(sha.raw1) << ", E2 "
            << format_real(sha.raw2) << '\n';
  if (sha.is_zero) {
    std::cout << "L(1) = 0: rank >= 2 under BSD; sha orders not defined\n";
    return 0;
  }
  std::cout << "sha: E1 " << sha.sha1 << ", E2 " << sha.sha2 << '\n';
  std::cout << "square: " << (sha.square1 ? "yes" : "NO") << " / "
            << (sha.square2 ? "yes" : "NO") << '\n';
  std::cout << "certified odd p-parts:";
  if (sha.certified_odd_primes.empty()) std::cout << " (none to certify)";
  for (u64 p : sha.certified_odd_primes) std::cout << ' ' << p;
  std::cout << '\n';
  // the good-ordinary certification covers p >= 3 only
  std::cout << "2-part: "
            << (sha.sha1 % 2 == 1 ? "trivial (odd order)"
                                  : "unknown (outside the p >= 3 criterion)")
            << '\n';
  if (sha.anomaly != Anomaly::None)
    std::cout << "anomaly: " << anomaly_name(sha.anomaly) << '\n';
  return 0;
}

int cmd_stats(const std::string& kind, const std::string& in,
              const std::string& out_dir, int k_max, int grid_points,
              const std::vector<u64>& primes) {
  if (kind != "orders" && kind != "ratios" && kind != "divisibility" &&
      kind != "growth" && kind != "rankone")
    throw SetzerError(Err::Usage, "unknown stats kind: " + kind);
  auto rows = read_scan_csv(in);
  auto grid = default_grid(rows, grid_points);
  std::vector<GridSeries> series;
  if (kind == "orders") {
    series = order_frequencies(rows, grid, k_max);
  } else if (kind == "ratios") {
    series = ratio_series(rows, grid, k_max);
  } else if (kind == "divisibility") {
    for (u64 p : primes) {
      auto s = divisibility_series(rows, grid, p);
      series.insert(series.end(), s.begin(), s.end());
    }
    GridSeries f0;
    f0.label = "f0_reference";
    for (u64 p : primes) {
      f0.x.push_back(static_cast<double>(p));
      f0.y.push_back(cohen_lenstra_f0(p));
    }
    series.push_back(f0);
  } else if (kind == "growth") {
    series = growth_series(rows, grid);
  } else if (kind == "rankone") {
    series = rank_one_series(rows, grid);
  } else {
    throw SetzerError(Err::Usage, "unknown stats kind: " + kind);
  }
  write_series_tsv(out_dir, series);
  std::cout << "wrote " << series.size() << " series to " << out_dir << '\n';
  return 0;
}

int cmd_hist(const std::string& target, const std::string& in,
             const std::string& out) {
  HistTarget t;
  if (target == "lvalue") {
    t = HistTarget::LValue;
  } else if (target == "sha1") {
    t = HistTarget::Sha1;
  } else if (target == "sha2") {
    t = HistTarget::Sha2;
  } else {
    throw SetzerError(Err::Usage, "unknown hist target: " + target);
  }
  auto rows = read_scan_csv(in);
  HistogramResult h = histogram(rows, HistogramSpec::for_target(t));
  write_histogram_tsv(out, h);
  std::cout << "rows " << h.total << " mean " << format_real(h.sample_mean)
            << " variance " << format_real(h.sample_variance) << '\n';
  return 0;
}

int cmd_verify(const std::string& in, u64 sample) {
  auto rows = read_scan_csv(in);
  if (rows.empty()) throw SetzerError(Err::EmptyInput, "no rows in " + in);

  std::vector<size_t> picks(rows.size());
  for (size_t i = 0; i < picks.size(); ++i) picks[i] = i;
  if (sample > 0 && sample < rows.size()) {
    std::mt19937_64 rng(0x5e72e51u);
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(sample);
    std::sort(picks.begin(), picks.end());
  }

  ApCache cache(cache_budget_mb() << 20);
  EvalOptions opts;
  opts.precision_bits = 128;  // +32 over the scan default
  opts.term_multiplier = 2;

  u64 mismatches = 0;
  auto close = [](double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
  };
  for (size_t idx : picks) {
    const ScanRecord& rec = rows[idx];
    if (rec.anomaly == Anomaly::Precision) continue;  // already flagged
    CurveParams params = classify(rec.u);
    bool ok = params.accepted() && class_name(params.cls) ==
                                       class_name(rec.cls);
    if (ok) {
      if (rec.has_sha) {
        ShaResult sha = analytic_sha(params, opts, &cache);
        double ltol = rec.tail_bound + sha.tail_bound +
                      1e-9 * std::max(1.0, std::fabs(rec.lvalue));
        ok = sha.is_zero == rec.is_zero && sha.sha1 == rec.sha1 &&
             sha.sha2 == rec.sha2 &&
             close(sha.lvalue, rec.lvalue, ltol) &&
             close(sha.omega, rec.omega,
                   1e-12 * std::max(1.0, std::fabs(rec.omega)));
      } else {
        RankOneResult r = rank_one_product(params, opts, &cache);
        double ltol = rec.tail_bound + r.tail_bound +
                      1e-9 * std::max(1.0, std::fabs(rec.lvalue));
        ok = close(r.lprime, rec.lvalue, ltol) &&
             close(r.sha_times_reg1, rec.sha_reg1,
                   2 * ltol / std::max(rec.omega, 1e-300));
      }
    }
    if (!ok) {
      ++mismatches;
      std::cout << "mismatch at u = " << rec.u << '\n';
    }
  }
  std::cout << "verified " << picks.size() << " rows, " << mismatches
            << " mismatches\n";
  return mismatches == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytic Tate-Shafarevich orders for the conductor u^2+64 "
               "curve families"};
  app.require_subcommand(1);

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "scan a range of u");
  ScanConfig config;
  std::string classes = "star,doublestar";
  scan_cmd->add_option("--min", config.u_min, "lower end of the u range")
      ->required();
  scan_cmd->add_option("--max", config.u_max, "upper end of the u range")
      ->required();
  scan_cmd->add_option("--classes", classes,
                       "comma list of star,doublestar,evenk");
  scan_cmd->add_option("--jobs", config.workers, "worker threads");
  scan_cmd->add_option("--precision-bits", config.precision_bits,
                       "series accumulator precision (>= 96)");
  scan_cmd->add_flag("--verify-terms", config.verify_terms,
                     "recheck every row at doubled terms");
  scan_cmd->add_option("--out", config.out_path, "output CSV path")
      ->required();
  scan_cmd->add_option("--checkpoint-every", config.checkpoint_every,
                       "chunks per checkpoint flush");

  // curve
  auto* curve_cmd = app.add_subcommand("curve", "report a single curve pair");
  i64 curve_u = 0;
  curve_cmd->add_option("u", curve_u, "curve parameter")->required();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "reduce a scan to series");
  std::string stats_kind, stats_in, stats_out;
  int k_max = 7, grid_points = 50;
  std::vector<u64> primes{2, 3, 5, 7, 11};
  stats_cmd
      ->add_option("kind", stats_kind,
                   "orders|ratios|divisibility|growth|rankone")
      ->required();
  stats_cmd->add_option("--in", stats_in, "scan CSV")->required();
  stats_cmd->add_option("--out", stats_out, "output directory")->required();
  stats_cmd->add_option("--kmax", k_max, "largest tracked k for f_k");
  stats_cmd->add_option("--grid-points", grid_points, "grid size");
  stats_cmd->add_option("--primes", primes, "primes for divisibility");

  // hist
  auto* hist_cmd = app.add_subcommand("hist", "normalized histogram");
  std::string hist_target, hist_in, hist_out;
  hist_cmd->add_option("target", hist_target, "lvalue|sha1|sha2")->required();
  hist_cmd->add_option("--in", hist_in, "scan CSV")->required();
  hist_cmd->add_option("--out", hist_out, "output TSV")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "recompute sampled rows");
  std::string verify_in;
  u64 verify_sample = 100;
  verify_cmd->add_option("--in", verify_in, "scan CSV")->required();
  verify_cmd->add_option("--sample", verify_sample,
                         "rows to recheck (0: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*scan_cmd) {
      apply_classes(classes, config);
      config.cache_mb = cache_budget_mb();
      if (config.workers <= 0) config.workers = omp_get_max_threads();
      return cmd_scan(config);
    }
    if (*curve_cmd) return cmd_curve(curve_u);
    if (*stats_cmd)
      return cmd_stats(stats_kind, stats_in, stats_out, k_max, grid_points,
                       primes);
    if (*hist_cmd) return cmd_hist(hist_target, hist_in, hist_out);
    if (*verify_cmd) return cmd_verify(verify_in, verify_sample);
  } catch (const SetzerError& e) {
    std::cerr << "error";
    if (e.u() != 0) std::cerr << " (u = " << e.u() << ")";
    std::cerr << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
