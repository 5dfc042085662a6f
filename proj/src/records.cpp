#include "blpp/records.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace blpp {

std::string build_version() {
#ifdef BLPP_VERSION
  return BLPP_VERSION;
#else
  return "unversioned";
#endif
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", &tm);
  return buf;
}

}  // namespace

RecordWriter::RecordWriter(std::string dir, RunInfo info) : dir_(std::move(dir)), info_(std::move(info)) {
  std::filesystem::create_directories(dir_);
}

void RecordWriter::write(const std::string& kind, const nlohmann::json& data, double runtime_sec) {
  nlohmann::json rec{{"kind", kind},
                     {"command", info_.command},
                     {"version", build_version()},
                     {"seed", info_.seed},
                     {"config", info_.config},
                     {"data", data},
                     {"timestamp", utc_now()},
                     {"runtime_sec", runtime_sec}};
  std::ofstream out(std::filesystem::path(dir_) / "records.jsonl", std::ios::app);
  if (!out) throw std::runtime_error("cannot open records.jsonl under " + dir_);
  out << rec.dump() << '\n';
}

namespace {

// RFC-4180 quoting for cells that carry separators or quotes
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

void RecordWriter::write_csv(const CsvTable& table) {
  std::ofstream out(std::filesystem::path(dir_) / (table.name + ".csv"));
  if (!out) throw std::runtime_error("cannot write " + table.name + ".csv under " + dir_);
  for (size_t i = 0; i < table.header.size(); ++i)
    out << csv_cell(table.header[i]) << (i + 1 < table.header.size() ? "," : "");
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("csv row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i)
      out << csv_cell(row[i]) << (i + 1 < row.size() ? "," : "");
    out << '\n';
  }
}

bool is_volatile_key(const std::string& key) { return key == "timestamp" || key == "runtime_sec"; }

nlohmann::json strip_volatile(nlohmann::json record) {
  if (record.is_object()) {
    record.erase("timestamp");
    record.erase("runtime_sec");
    for (auto& [key, val] : record.items()) val = strip_volatile(val);
  } else if (record.is_array()) {
    for (auto& val : record) val = strip_volatile(val);
  }
  return record;
}

std::vector<nlohmann::json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

std::string CompareReport::summary() const {
  std::string s = pass ? (vacuous ? "PASS (vacuous: no thresholds)" : "PASS") : "FAIL";
  for (const auto& l : lines) s += "\n  " + l;
  return s;
}

namespace {

const nlohmann::json* field(const nlohmann::json& rec, const char* key) {
  auto it = rec.find("data");
  if (it == rec.end() || !it->is_object()) return nullptr;
  auto jt = it->find(key);
  return jt == it->end() ? nullptr : &*jt;
}

bool same_thresholds(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].get<double>() - b[i].get<double>()) > 1e-12) return false;
  return true;
}

double opt_num(const nlohmann::json& point, const char* key) {
  auto it = point.find(key);
  return it == point.end() ? 0.0 : it->get<double>();
}

}  // namespace

CompareReport compare_records(const nlohmann::json& a, const nlohmann::json& b, double nsigma) {
  const nlohmann::json *qa = field(a, "query"), *qb = field(b, "query");
  const nlohmann::json *pa = field(a, "points"), *pb = field(b, "points");
  if (!qa || !qb || !pa || !pb || !pa->is_array() || !pb->is_array())
    throw std::invalid_argument("compare_records: records lack a query/points block");

  CompareReport rep;
  if (*qa != *qb) {
    rep.pass = false;
    rep.lines.push_back("incomparable records: query " + qa->dump() + " vs " + qb->dump());
    return rep;
  }
  if (pa->empty() && pb->empty()) {
    rep.pass = true;
    rep.vacuous = true;
    return rep;
  }

  rep.pass = true;
  for (const auto& pt : *pa) {
    const nlohmann::json* match = nullptr;
    for (const auto& qt : *pb)
      if (same_thresholds(pt.at("a"), qt.at("a"))) {
        match = &qt;
        break;
      }
    if (!match) {
      rep.pass = false;
      rep.lines.push_back("no matching point for a = " + pt.at("a").dump());
      continue;
    }
    double va = pt.at("value").get<double>(), vb = match->at("value").get<double>();
    double sa = opt_num(pt, "stderr"), sb = opt_num(*match, "stderr");
    double band = nsigma * std::sqrt(sa * sa + sb * sb) + opt_num(pt, "budget") +
                  opt_num(*match, "budget");
    double delta = std::abs(va - vb);
    bool ok = delta <= band;
    rep.pass = rep.pass && ok;
    rep.lines.push_back("a = " + pt.at("a").dump() + ": " + fmt17(va) + " vs " + fmt17(vb) +
                        ", |delta| = " + fmt17(delta) + (ok ? " <= " : " > ") + fmt17(band) +
                        (ok ? "  ok" : "  FAIL"));
  }
  size_t extra = 0;
  for (const auto& qt : *pb) {
    bool found = false;
    for (const auto& pt : *pa)
      if (same_thresholds(pt.at("a"), qt.at("a"))) found = true;
    if (!found) ++extra;
  }
  if (extra) rep.lines.push_back(std::to_string(extra) + " point(s) only in the second record");
  return rep;
}

}  // namespace blpp
