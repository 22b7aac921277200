#include "fbmlab/harness/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "fbmlab/core.hpp"
#include "fbmlab/harness/csv.hpp"

namespace fbmlab::harness {

namespace fs = std::filesystem;

namespace {

std::string join_seeds(const std::vector<std::uint64_t> &s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i)
    out += (i ? ";" : "") + std::to_string(s[i]);
  return out;
}

} // namespace

CsvTable report_csv(const std::vector<ReportRow> &rows) {
  CsvTable t({"manifest", "command", "seeds", "params", "label", "status", "estimate",
              "ci_lo", "ci_hi", "outputs"});
  for (const auto &r : rows)
    t.row()
        .add(r.manifest)
        .add(r.command)
        .add(r.seeds)
        .add(r.key_params)
        .add(r.label)
        .add(r.status)
        .add(r.estimate)
        .add(r.ci_lo)
        .add(r.ci_hi)
        .add(r.outputs);
  return t;
}

std::vector<ReportRow> report(const std::vector<std::string> &manifests,
                              const std::string &out_dir, std::ostream &out) {
  static const std::set<std::string> skip = {"command", "seeds", "workers", "out",
                                             "plots"};
  std::vector<ReportRow> rows;
  for (const auto &path : manifests) {
    const RunManifest m = read_manifest(path);
    std::string params;
    for (const auto &kv : m.config) {
      if (skip.count(kv.first))
        continue;
      params += (params.empty() ? "" : ";") + kv.first + "=" + kv.second;
    }
    rows.push_back({path, m.command, join_seeds(m.seeds), params, m.headline.label,
                    m.headline.status, m.headline.estimate, m.headline.ci_lo,
                    m.headline.ci_hi});
    const auto bad = verify_manifest(m, fs::path(path).parent_path().string());
    if (!bad.empty()) {
      rows.back().outputs = "changed:";
      for (std::size_t i = 0; i < bad.size(); ++i)
        rows.back().outputs += (i ? ";" : "") + bad[i];
    }
  }

  const std::vector<std::string> head = {"command", "seeds", "label", "status",
                                         "estimate", "ci_lo", "ci_hi", "outputs", "params"};
  std::vector<std::vector<std::string>> cells;
  for (const auto &r : rows)
    cells.push_back({r.command, r.seeds, r.label, r.status, format_double(r.estimate),
                     format_double(r.ci_lo), format_double(r.ci_hi), r.outputs, r.key_params});
  std::vector<std::size_t> w(head.size());
  for (std::size_t k = 0; k < head.size(); ++k) {
    w[k] = head[k].size();
    for (const auto &c : cells)
      w[k] = std::max(w[k], c[k].size());
  }
  auto line = [&](const std::vector<std::string> &f) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      out << f[k];
      if (k + 1 < f.size())
        out << std::string(w[k] - f[k].size() + 2, ' ');
    }
    out << "\n";
  };
  line(head);
  for (const auto &c : cells)
    line(c);

  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    report_csv(rows).write((fs::path(out_dir) / "report.csv").string());
  }
  return rows;
}

} // namespace fbmlab::harness
