#include "fbmlab/harness/manifest.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbmlab/core.hpp"
#include "fbmlab/harness/digest.hpp"

namespace fbmlab::harness {

using nlohmann::json;

namespace {

// JSON has no NaN/inf; they travel as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json &j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

} // namespace

std::string manifest_to_json(const RunManifest &m) {
  json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["timestamp"] = m.timestamp;
  json cfg = json::array();
  for (const auto &kv : m.config)
    cfg.push_back({kv.first, kv.second});
  j["config"] = cfg;
  j["seeds"] = m.seeds;
  j["workers"] = m.workers;
  json outs = json::array();
  for (const auto &o : m.outputs)
    outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  j["outputs"] = outs;
  json stages = json::array();
  for (const auto &s : m.stages)
    stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["stages"] = stages;
  j["headline"] = {{"label", m.headline.label},
                   {"status", m.headline.status},
                   {"estimate", number(m.headline.estimate)},
                   {"ci_lo", number(m.headline.ci_lo)},
                   {"ci_hi", number(m.headline.ci_hi)}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string &text) {
  const json j = json::parse(text);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  for (const auto &kv : j.at("config"))
    m.config.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.workers = j.at("workers").get<int>();
  for (const auto &o : j.at("outputs"))
    m.outputs.push_back({o.at("file").get<std::string>(),
                         o.at("sha256").get<std::string>(),
                         o.at("bytes").get<std::uint64_t>()});
  for (const auto &s : j.at("stages"))
    m.stages.push_back({s.at("name").get<std::string>(), s.at("seconds").get<double>()});
  const json &h = j.at("headline");
  m.headline.label = h.at("label").get<std::string>();
  m.headline.status = h.at("status").get<std::string>();
  m.headline.estimate = read_number(h.at("estimate"));
  m.headline.ci_lo = read_number(h.at("ci_lo"));
  m.headline.ci_hi = read_number(h.at("ci_hi"));
  return m;
}

RunManifest read_manifest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("manifest '" + path + "' does not exist or is unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return manifest_from_json(ss.str());
  } catch (const json::exception &e) {
    throw Error("manifest '" + path + "' is corrupt: " + e.what());
  }
}

void write_manifest(const RunManifest &m, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << manifest_to_json(m);
}

std::vector<std::string> verify_manifest(const RunManifest &m,
                                         const std::string &run_dir) {
  std::vector<std::string> bad;
  for (const auto &o : m.outputs) {
    const auto p = std::filesystem::path(run_dir) / o.file;
    std::error_code ec;
    if (!std::filesystem::exists(p, ec) || sha256_file(p.string()) != o.sha256)
      bad.push_back(o.file);
  }
  return bad;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace fbmlab::harness
