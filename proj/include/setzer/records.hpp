#pragma once

// The persisted per-u row and its CSV encoding. One line per accepted u;
// reals carry 15 significant digits; non-applicable columns stay empty; the
// file ends with a "#checkpoint <last_u>" footer.

#include <string>
#include <vector>

#include "setzer/bsd.hpp"
#include "setzer/curves.hpp"

namespace setzer {

inline constexpr const char* kCsvHeader =
    "u,N,k,factors,class,epsilon,terms,lvalue,tail_bound,omega,raw1,raw2,"
    "sha1,sha2,is_zero,square1,square2,certified,sha_reg1,anomaly";

struct ScanRecord {
  i64 u = 0;
  u128 n = 0;
  int k = 0;
  std::vector<u64> factors;
  CurveClass cls = CurveClass::Rejected;
  int epsilon = 0;
  u64 terms = 0;
  double lvalue = 0;      // L(1) or L'(1) per class
  double tail_bound = 0;
  double omega = 0;
  bool has_sha = false;   // star/doublestar rows
  double raw1 = 0, raw2 = 0;
  i64 sha1 = 0, sha2 = 0;
  bool is_zero = false;
  bool square1 = true, square2 = true;
  std::vector<u64> certified;
  bool has_sha_reg1 = false;  // evenk rows
  double sha_reg1 = 0;
  Anomaly anomaly = Anomaly::None;
};

std::string anomaly_name(Anomaly a);
std::string format_real(double v);  // %.15g
std::string format_record(const ScanRecord& rec);  // no trailing newline
ScanRecord parse_record(const std::string& line);  // throws SetzerError

// Reads data rows; validates the header; ignores the checkpoint footer.
std::vector<ScanRecord> read_scan_csv(const std::string& path);

}  // namespace setzer
