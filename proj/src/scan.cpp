#include "setzer/scan.hpp"

#include <omp.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

#include "setzer/errors.hpp"

namespace setzer {

namespace {

i64 first_candidate(i64 from) {
  i64 r = from % 4;
  if (r < 0) r += 4;
  return from + (r <= 1 ? 1 - r : 5 - r);
}

u64 candidate_count(i64 from, i64 to) {
  i64 first = first_candidate(from);
  if (first > to) return 0;
  return static_cast<u64>((to - first) / 4) + 1;
}

bool class_requested(const ScanConfig& config, CurveClass cls) {
  switch (cls) {
    case CurveClass::Star: return config.include_star;
    case CurveClass::DoubleStar: return config.include_doublestar;
    case CurveClass::EvenK: return config.include_evenk;
    default: return false;
  }
}

struct ChunkResult {
  std::vector<ScanRecord> records;
  u64 rejected = 0;
};

// Star-only scans can classify by a single primality test.
CurveParams classify_for(const ScanConfig& config, i64 u) {
  if (config.include_star && !config.include_doublestar &&
      !config.include_evenk) {
    u128 n = static_cast<u128>(static_cast<i128>(u) * u) + 64;
    if (!arith::is_prime(n)) {
      CurveParams p;
      p.u = u;
      p.n = n;
      p.cls = CurveClass::Rejected;
      p.reason = RejectReason::NotSquarefree;  // not used; filtered anyway
      return p;
    }
  }
  return classify(u);
}

void process_chunk(const ScanConfig& config, i64 chunk_first, int count,
                   ApCache* cache, ChunkResult& out) {
  EvalOptions opts;
  opts.precision_bits = config.precision_bits;
  for (int i = 0; i < count; ++i) {
    i64 u = chunk_first + 4 * static_cast<i64>(i);
    CurveParams params = classify_for(config, u);
    if (!params.accepted() || !class_requested(config, params.cls)) {
      ++out.rejected;
      continue;
    }
    out.records.push_back(
        compute_record(params, opts, config.verify_terms, cache));
  }
}

class ScanWriter {
 public:
  ScanWriter(const std::string& path, std::streamoff data_end, bool fresh)
      : path_(path), data_end_(data_end) {
    if (fresh) {
      std::ofstream header(path_, std::ios::binary | std::ios::trunc);
      if (!header) throw SetzerError(Err::Io, "cannot create " + path_);
      header << kCsvHeader << '\n';
      header.flush();
      if (!header) throw SetzerError(Err::Io, "write failed on " + path_);
      data_end_ = header.tellp();
    } else {
      // Drop any trailing partial line or stale footer.
      std::filesystem::resize_file(path_, static_cast<u64>(data_end_));
    }
    file_.open(path_, std::ios::binary | std::ios::in | std::ios::out);
    if (!file_) throw SetzerError(Err::Io, "cannot open " + path_);
  }

  void flush_wave(const std::vector<const ChunkResult*>& chunks,
                  i64 checkpoint_u) {
    file_.seekp(data_end_);
    for (const ChunkResult* chunk : chunks)
      for (const ScanRecord& rec : chunk->records)
        file_ << format_record(rec) << '\n';
    file_.flush();
    if (!file_) throw SetzerError(Err::Io, "write failed on " + path_);
    data_end_ = file_.tellp();
    // Drop any longer stale footer before writing the fresh one.
    std::filesystem::resize_file(path_, static_cast<u64>(data_end_));
    file_.seekp(data_end_);
    file_ << "#checkpoint " << checkpoint_u << '\n';
    file_.flush();
    if (!file_) throw SetzerError(Err::Io, "write failed on " + path_);
  }

 private:
  std::string path_;
  std::streamoff data_end_;
  std::fstream file_;
};

ScanSummary scan_impl(const ScanConfig& config, bool parallel) {
  if (config.u_min > config.u_max)
    throw SetzerError(Err::Usage, "scan: u_min must be <= u_max");
  if (config.out_path.empty())
    throw SetzerError(Err::Usage, "scan: output path required");
  if (config.precision_bits < 96 || config.precision_bits > 128)
    throw SetzerError(Err::Usage, "scan: precision bits must be in [96,128]");

  ScanSummary summary;
  i64 from = config.u_min;
  ResumeState state;
  state.fresh = true;
  if (std::filesystem::exists(config.out_path)) {
    state = resume(config.out_path);
    if (state.has_checkpoint || state.rows > 0)
      from = std::max(from, state.checkpoint_u + 1);
    state.fresh = false;  // header verified; append after the prefix
  }

  i64 first = first_candidate(from);
  u64 n_candidates = candidate_count(from, config.u_max);
  u64 ints_in_range =
      from <= config.u_max ? static_cast<u64>(config.u_max - from) + 1 : 0;
  if (n_candidates == 0) {
    // Nothing left; leave a completed file untouched.
    summary.rejected = ints_in_range;
    if (state.fresh || !state.intact || ints_in_range > 0) {
      ScanWriter writer(config.out_path, state.data_end, state.fresh);
      writer.flush_wave({}, config.u_max);
    }
    return summary;
  }
  summary.rejected += ints_in_range - n_candidates;

  const int chunk_size = std::max(config.chunk_size, 1);
  const u64 n_chunks = (n_candidates + chunk_size - 1) / chunk_size;
  int workers = config.workers > 0 ? config.workers : omp_get_max_threads();
  const u64 wave_chunks = std::max<u64>(
      {static_cast<u64>(config.checkpoint_every), static_cast<u64>(workers),
       1});

  ApCache cache(config.cache_mb << 20);
  ScanWriter writer(config.out_path, state.data_end, state.fresh);

  std::vector<ChunkResult> results(wave_chunks);
  for (u64 wave = 0; wave < n_chunks; wave += wave_chunks) {
    const u64 wave_end = std::min(wave + wave_chunks, n_chunks);
    const int in_wave = static_cast<int>(wave_end - wave);
    for (int i = 0; i < in_wave; ++i) results[i] = ChunkResult{};

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
      for (int i = 0; i < in_wave; ++i) {
        u64 ci = wave + static_cast<u64>(i);
        u64 begin = ci * chunk_size;
        int count = static_cast<int>(
            std::min<u64>(chunk_size, n_candidates - begin));
        process_chunk(config, first + 4 * static_cast<i64>(begin), count,
                      &cache, results[i]);
      }
    } else {
      for (int i = 0; i < in_wave; ++i) {
        u64 ci = wave + static_cast<u64>(i);
        u64 begin = ci * chunk_size;
        int count = static_cast<int>(
            std::min<u64>(chunk_size, n_candidates - begin));
        process_chunk(config, first + 4 * static_cast<i64>(begin), count,
                      &cache, results[i]);
      }
    }

    std::vector<const ChunkResult*> ordered;
    ordered.reserve(in_wave);
    for (int i = 0; i < in_wave; ++i) {
      ordered.push_back(&results[i]);
      summary.rejected += results[i].rejected;
      for (const ScanRecord& rec : results[i].records) {
        ++summary.processed;
        if (rec.has_sha && rec.is_zero) ++summary.zeros;
        if (rec.anomaly != Anomaly::None) ++summary.anomalies;
      }
    }
    u64 last_index = std::min(wave_end * chunk_size, n_candidates) - 1;
    i64 checkpoint_u = first + 4 * static_cast<i64>(last_index);
    if (wave_end == n_chunks) checkpoint_u = std::max(checkpoint_u, config.u_max);
    writer.flush_wave(ordered, checkpoint_u);
  }
  return summary;
}

}  // namespace

ScanSummary scan(const ScanConfig& config) { return scan_impl(config, true); }

ScanSummary scan_serial(const ScanConfig& config) {
  return scan_impl(config, false);
}

ResumeState resume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SetzerError(Err::Io, "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  ResumeState state;
  size_t header_end = content.find('\n');
  if (header_end == std::string::npos ||
      content.substr(0, header_end) != kCsvHeader)
    throw SetzerError(Err::Io, "missing or invalid header in " + path);

  state.fresh = false;
  state.data_end = static_cast<std::streamoff>(header_end + 1);
  size_t pos = header_end + 1;
  bool saw_footer = false;
  while (pos < content.size()) {
    size_t eol = content.find('\n', pos);
    bool terminated = eol != std::string::npos;
    std::string line =
        content.substr(pos, (terminated ? eol : content.size()) - pos);
    if (saw_footer && !line.empty())
      throw SetzerError(Err::CorruptCheckpoint,
                        "data after checkpoint footer in " + path);
    if (!line.empty() && line[0] == '#') {
      if (!terminated) {
        state.intact = false;  // footer cut mid-write; recoverable
        break;
      }
      if (line.rfind("#checkpoint ", 0) != 0)
        throw SetzerError(Err::CorruptCheckpoint,
                          "malformed trailer in " + path + ": " + line);
      errno = 0;
      char* end = nullptr;
      i64 v = std::strtoll(line.c_str() + 12, &end, 10);
      if (end == line.c_str() + 12 || *end != '\0' || errno != 0)
        throw SetzerError(Err::CorruptCheckpoint,
                          "malformed trailer in " + path + ": " + line);
      state.has_checkpoint = true;
      state.checkpoint_u = v;
      saw_footer = true;
      pos = eol + 1;
      continue;
    }
    if (!line.empty()) {
      bool ok = terminated;
      ScanRecord rec;
      if (ok) {
        try {
          rec = parse_record(line);
        } catch (const SetzerError&) {
          ok = false;
        }
      }
      if (!ok) {
        if (terminated && content.find_first_not_of(
                              "\n", eol) != std::string::npos)
          throw SetzerError(Err::CorruptCheckpoint,
                            "malformed record mid-file in " + path);
        state.intact = false;  // partial trailing record; discard
        break;
      }
      ++state.rows;
      if (!state.has_checkpoint) state.checkpoint_u = rec.u;
      state.data_end = static_cast<std::streamoff>(eol + 1);
    }
    pos = terminated ? eol + 1 : content.size();
  }
  if (state.rows == 0 && !state.has_checkpoint) state.fresh = true;
  return state;
}

ScanRecord compute_record(const CurveParams& params, const EvalOptions& opts,
                          bool verify_terms, ApCache* cache) {
  ScanRecord rec;
  rec.u = params.u;
  rec.n = params.n;
  rec.k = params.k;
  for (u128 p : params.factorization.primes)
    rec.factors.push_back(static_cast<u64>(p));
  rec.cls = params.cls;
  rec.epsilon = params.epsilon;

  if (params.cls == CurveClass::EvenK) {
    RankOneResult r = rank_one_product(params, opts, cache);
    rec.terms = r.terms_used;
    rec.lvalue = r.lprime;
    rec.tail_bound = r.tail_bound;
    rec.omega = r.omega;
    rec.has_sha_reg1 = true;
    rec.sha_reg1 = r.sha_times_reg1;
    return rec;
  }

  ShaResult sha = analytic_sha(params, opts, cache);
  rec.terms = sha.terms_used;
  rec.lvalue = sha.lvalue;
  rec.tail_bound = sha.tail_bound;
  rec.omega = sha.omega;
  rec.has_sha = true;
  rec.raw1 = sha.raw1;
  rec.raw2 = sha.raw2;
  rec.sha1 = sha.sha1;
  rec.sha2 = sha.sha2;
  rec.is_zero = sha.is_zero;
  rec.square1 = sha.square1;
  rec.square2 = sha.square2;
  rec.certified = sha.certified_odd_primes;
  rec.anomaly = sha.anomaly;

  if (verify_terms && sha.anomaly == Anomaly::None) {
    EvalOptions doubled = opts;
    doubled.term_multiplier *= 2;
    ShaResult again = analytic_sha(params, doubled, cache);
    if (again.sha1 != sha.sha1 || again.sha2 != sha.sha2 ||
        again.is_zero != sha.is_zero)
      rec.anomaly = Anomaly::VerifyTerms;
  }
  return rec;
}

}  // namespace setzer
