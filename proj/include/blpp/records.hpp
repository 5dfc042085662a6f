#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace blpp {

// build version baked in at compile time (0.x.y+<git rev>)
std::string build_version();

// full-precision round-trip text for table cells and diagnostics
std::string fmt17(double v);

// provenance stamped on every record line
struct RunInfo {
  std::string command;
  uint64_t seed = 1;
  nlohmann::json config;  // fully resolved echo, every default explicit
};

struct CsvTable {
  std::string name;  // file basename without extension
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Appends one line per result to <dir>/records.jsonl and writes tables as
// sibling CSV files. A line holds: kind, command, version, seed, config, data,
// plus the volatile keys (timestamp, runtime_sec) that differ between
// otherwise identical runs. Everything else is byte-reproducible for a fixed
// config + seed + binary.
class RecordWriter {
 public:
  RecordWriter(std::string dir, RunInfo info);
  void write(const std::string& kind, const nlohmann::json& data, double runtime_sec);
  void write_csv(const CsvTable& table);
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  RunInfo info_;
};

// the keys that legitimately differ between identical runs
bool is_volatile_key(const std::string& key);
// record with the volatile keys removed at every depth, for byte-level
// reproducibility checks
nlohmann::json strip_volatile(nlohmann::json record);

// parse a records.jsonl file back into its lines
std::vector<nlohmann::json> read_records(const std::string& path);

struct CompareReport {
  bool pass = false;
  bool vacuous = false;  // no thresholds to compare; pass, but flagged
  std::vector<std::string> lines;
  std::string summary() const;
};

// Verdict between two result records that claim the same quantity. Records
// are comparable when their data.query blocks coincide (same m, ic, times or
// slices); a mismatch fails with a diagnostic rather than comparing apples to
// oranges. data.points[] entries hold a threshold vector "a", a "value", and
// optional "stderr" / "budget"; points are matched by threshold vector and
// each must satisfy |va - vb| <= nsigma sqrt(sa^2 + sb^2) + ba + bb.
// Structurally malformed records (no data.query / data.points) are rejected.
CompareReport compare_records(const nlohmann::json& a, const nlohmann::json& b,
                              double nsigma = 3.0);

}  // namespace blpp
