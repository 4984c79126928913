#include "setzer/records.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "setzer/errors.hpp"

namespace setzer {

std::string anomaly_name(Anomaly a) {
  switch (a) {
    case Anomaly::None: return "";
    case Anomaly::Precision: return "precision";
    case Anomaly::NonSquare: return "nonsquare";
    case Anomaly::VerifyTerms: return "verifyterms";
  }
  return "";
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace {

std::string join_primes(const std::vector<u64>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<u64> split_primes(const std::string& s) {
  std::vector<u64> v;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find(';', pos);
    if (next == std::string::npos) next = s.size();
    v.push_back(std::strtoull(s.substr(pos, next - pos).c_str(), nullptr, 10));
    pos = next + 1;
  }
  return v;
}

Anomaly anomaly_from_name(const std::string& s) {
  if (s.empty()) return Anomaly::None;
  if (s == "precision") return Anomaly::Precision;
  if (s == "nonsquare") return Anomaly::NonSquare;
  if (s == "verifyterms") return Anomaly::VerifyTerms;
  throw SetzerError(Err::CorruptCheckpoint, "unknown anomaly tag: " + s);
}

CurveClass class_from_name(const std::string& s) {
  if (s == "star") return CurveClass::Star;
  if (s == "doublestar") return CurveClass::DoubleStar;
  if (s == "evenk") return CurveClass::EvenK;
  throw SetzerError(Err::CorruptCheckpoint, "unknown class tag: " + s);
}

double parse_real(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string format_record(const ScanRecord& rec) {
  std::string line;
  line.reserve(256);
  line += std::to_string(rec.u);
  line += ',';
  line += arith::to_string(rec.n);
  line += ',';
  line += std::to_string(rec.k);
  line += ',';
  line += join_primes(rec.factors);
  line += ',';
  line += class_name(rec.cls);
  line += ',';
  line += std::to_string(rec.epsilon);
  line += ',';
  line += std::to_string(rec.terms);
  line += ',';
  line += format_real(rec.lvalue);
  line += ',';
  line += format_real(rec.tail_bound);
  line += ',';
  line += format_real(rec.omega);
  line += ',';
  if (rec.has_sha) {
    line += format_real(rec.raw1);
    line += ',';
    line += format_real(rec.raw2);
    line += ',';
    line += std::to_string(rec.sha1);
    line += ',';
    line += std::to_string(rec.sha2);
    line += ',';
    line += rec.is_zero ? "1" : "0";
    line += ',';
    line += rec.square1 ? "1" : "0";
    line += ',';
    line += rec.square2 ? "1" : "0";
    line += ',';
    line += join_primes(rec.certified);
    line += ',';
  } else {
    line += ",,,,,,,,";
  }
  if (rec.has_sha_reg1) line += format_real(rec.sha_reg1);
  line += ',';
  line += anomaly_name(rec.anomaly);
  return line;
}

ScanRecord parse_record(const std::string& line) {
  std::vector<std::string> f;
  f.reserve(20);
  size_t pos = 0;
  while (true) {
    size_t next = line.find(',', pos);
    if (next == std::string::npos) {
      f.push_back(line.substr(pos));
      break;
    }
    f.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  if (f.size() != 20)
    throw SetzerError(Err::CorruptCheckpoint,
                      "record does not have 20 fields: " + line);
  ScanRecord rec;
  rec.u = std::strtoll(f[0].c_str(), nullptr, 10);
  rec.n = arith::parse_u128(f[1]);
  rec.k = static_cast<int>(std::strtol(f[2].c_str(), nullptr, 10));
  rec.factors = split_primes(f[3]);
  rec.cls = class_from_name(f[4]);
  rec.epsilon = static_cast<int>(std::strtol(f[5].c_str(), nullptr, 10));
  rec.terms = std::strtoull(f[6].c_str(), nullptr, 10);
  rec.lvalue = parse_real(f[7]);
  rec.tail_bound = parse_real(f[8]);
  rec.omega = parse_real(f[9]);
  rec.has_sha = !f[10].empty();
  if (rec.has_sha) {
    rec.raw1 = parse_real(f[10]);
    rec.raw2 = parse_real(f[11]);
    rec.sha1 = std::strtoll(f[12].c_str(), nullptr, 10);
    rec.sha2 = std::strtoll(f[13].c_str(), nullptr, 10);
    rec.is_zero = f[14] == "1";
    rec.square1 = f[15] == "1";
    rec.square2 = f[16] == "1";
    rec.certified = split_primes(f[17]);
  }
  rec.has_sha_reg1 = !f[18].empty();
  if (rec.has_sha_reg1) rec.sha_reg1 = parse_real(f[18]);
  rec.anomaly = anomaly_from_name(f[19]);
  return rec;
}

std::vector<ScanRecord> read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SetzerError(Err::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw SetzerError(Err::Io, "missing or invalid header in " + path);
  std::vector<ScanRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') continue;  // checkpoint footer
    rows.push_back(parse_record(line));
  }
  return rows;
}

}  // namespace setzer
