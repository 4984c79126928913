// Benchmark comparing the serial reference kernels against the fast paths:
// character-sum a_p vs BSGS order counting, cached vs uncached lookups, the
// double-double vs __float128 series, and the serial vs OpenMP scan.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "setzer/lseries.hpp"
#include "setzer/scan.hpp"

using namespace setzer;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void bench_ap() {
  std::printf("a_p kernels (per call, averaged over residues)\n");
  std::printf("%12s %14s %14s %10s\n", "p", "charsum", "bsgs", "agree");
  for (u64 p : {4099ull, 16411ull, 65537ull, 262147ull, 1048583ull}) {
    const int reps = p > 100000 ? 40 : 200;
    std::vector<i64> us;
    for (int i = 0; i < reps; ++i) us.push_back(1 + 4 * (i * 2654435761ull % p));

    auto t0 = Clock::now();
    i64 sink_ref = 0;
    for (i64 u : us) sink_ref += ap_reference(u, p);
    double ref = seconds_since(t0) / reps;

    t0 = Clock::now();
    i64 sink_fast = 0;
    for (i64 u : us) sink_fast += ap_bsgs(u, p);
    double fast = seconds_since(t0) / reps;

    std::printf("%12llu %11.2f us %11.2f us %10s\n",
                static_cast<unsigned long long>(p), ref * 1e6, fast * 1e6,
                sink_ref == sink_fast ? "yes" : "NO");
  }
}

void bench_series() {
  std::printf("\nL(1) series for u = 19997 (single curve)\n");
  CurveParams params = classify(19997);
  if (!params.accepted() || params.epsilon != 1) {
    std::printf("  (pick a different u)\n");
    return;
  }
  ApCache cache;
  (void)l_at_1(params, {}, &cache);  // warm the a_p cache
  for (int bits : {96, 113}) {
    EvalOptions opts;
    opts.precision_bits = bits;
    auto t0 = Clock::now();
    LValueResult r = l_at_1(params, opts, &cache);
    std::printf("  %3d-bit accumulator: %8.1f ms  L(1) = %.15g (M = %llu)\n",
                r.precision_bits, seconds_since(t0) * 1e3, r.value,
                static_cast<unsigned long long>(r.terms_used));
  }
}

void bench_scan() {
  std::printf("\nscan [1, 4000], star+doublestar\n");
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "setzer_bench";
  fs::create_directories(dir);

  ScanConfig config;
  config.u_min = 1;
  config.u_max = 4000;

  config.out_path = (dir / "serial.csv").string();
  fs::remove(config.out_path);
  auto t0 = Clock::now();
  ScanSummary serial = scan_serial(config);
  double t_serial = seconds_since(t0);
  std::printf("  serial reference: %7.2f s (%llu rows)\n", t_serial,
              static_cast<unsigned long long>(serial.processed));

  int threads = omp_get_max_threads();
  config.out_path = (dir / "parallel.csv").string();
  config.workers = threads;
  fs::remove(config.out_path);
  t0 = Clock::now();
  ScanSummary parallel = scan(config);
  double t_parallel = seconds_since(t0);
  std::printf("  openmp x%-2d:       %7.2f s (%llu rows), speedup %.2fx\n",
              threads, t_parallel,
              static_cast<unsigned long long>(parallel.processed),
              t_serial / t_parallel);

  bool identical = read_file((dir / "serial.csv").string()) ==
                   read_file((dir / "parallel.csv").string());
  std::printf("  outputs byte-identical: %s\n", identical ? "yes" : "NO");
}

}  // namespace

int main() {
  bench_ap();
  bench_series();
  bench_scan();
  return 0;
}
