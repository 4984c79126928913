#pragma once

// Range scan over u = 1 mod 4: classify, compute, persist, resume. Records
// land in ascending u order regardless of scheduling; a checkpoint footer
// makes interrupted scans resumable and re-runs idempotent.
//
// scan() processes chunks of candidates with OpenMP workers; scan_serial()
// is the plain single-threaded reference kept for testing and benchmarks.
// Both produce byte-identical files.

#include <ios>
#include <string>

#include "setzer/records.hpp"

namespace setzer {

struct ScanConfig {
  i64 u_min = 0;
  i64 u_max = 0;
  bool include_star = true;
  bool include_doublestar = true;
  bool include_evenk = false;
  int precision_bits = 96;
  int workers = 0;  // 0: all hardware threads
  std::string out_path;
  bool verify_terms = false;   // recompute at doubled terms, flag mismatches
  int checkpoint_every = 16;   // chunks per checkpoint flush
  std::size_t cache_mb = 256;  // a_p cache budget
  int chunk_size = 64;         // candidates per chunk
};

struct ScanSummary {
  u64 processed = 0;
  u64 rejected = 0;
  u64 zeros = 0;
  u64 anomalies = 0;
};

struct ResumeState {
  bool fresh = true;          // no usable rows
  bool intact = true;         // no trailing partial line
  bool has_checkpoint = false;
  i64 checkpoint_u = 0;       // candidates above this remain
  u64 rows = 0;
  std::streamoff data_end = 0;  // append offset (footer excluded)
};

// Largest contiguous scanned prefix of an existing scan file.
// Throws Err::Io when unreadable, Err::CorruptCheckpoint on a malformed
// trailer; a truncated final line is recovered, not an error.
ResumeState resume(const std::string& path);

ScanSummary scan(const ScanConfig& config);
ScanSummary scan_serial(const ScanConfig& config);

// One row for an accepted u (exposed for the single-curve report and tests).
ScanRecord compute_record(const CurveParams& params, const EvalOptions& opts,
                          bool verify_terms, ApCache* cache);

}  // namespace setzer
