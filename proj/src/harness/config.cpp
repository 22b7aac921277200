#include "fbmlab/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fbmlab/core.hpp"

namespace fbmlab::harness {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ','))
    out.push_back(trim(item));
  return out;
}

bool parse_real(const std::string &s, double &v) {
  if (s.empty())
    return false;
  // A few exact fractions are handy for ladders: "1/3", "2^-9".
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    double a, b;
    if (!parse_real(s.substr(0, slash), a) || !parse_real(s.substr(slash + 1), b) ||
        b == 0)
      return false;
    v = a / b;
    return true;
  }
  const auto caret = s.find('^');
  if (caret != std::string::npos) {
    double a, b;
    if (!parse_real(s.substr(0, caret), a) || !parse_real(s.substr(caret + 1), b))
      return false;
    v = std::pow(a, b);
    return std::isfinite(v);
  }
  const char *first = s.data();
  const char *last = s.data() + s.size();
  if (*first == '+')
    ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && p == last && std::isfinite(v);
}

bool parse_integer(const std::string &s, long &v) {
  if (s.empty())
    return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string describe_range(const KeySpec &k) {
  std::ostringstream os;
  os << (k.min_exclusive ? "(" : "[") << k.min << ", " << k.max << "]";
  return os.str();
}

void check_number(const KeySpec &k, double v) {
  const bool low = k.min_exclusive ? !(v > k.min) : !(v >= k.min);
  if (low || !(v <= k.max))
    throw ConfigError(k.name, "value out of range " + describe_range(k));
}

void check_value(const KeySpec &k, const std::string &value) {
  switch (k.type) {
  case ValueType::real: {
    double v;
    if (!parse_real(value, v))
      throw ConfigError(k.name, "expected a real number, got '" + value + "'");
    check_number(k, v);
    break;
  }
  case ValueType::integer: {
    long v;
    if (!parse_integer(value, v))
      throw ConfigError(k.name, "expected an integer, got '" + value + "'");
    check_number(k, static_cast<double>(v));
    break;
  }
  case ValueType::real_list: {
    const auto items = split_list(value);
    if (items.empty())
      throw ConfigError(k.name, "expected a nonempty list");
    for (const auto &s : items) {
      double v;
      if (!parse_real(s, v))
        throw ConfigError(k.name, "expected a real number, got '" + s + "'");
      check_number(k, v);
    }
    break;
  }
  case ValueType::integer_list: {
    const auto items = split_list(value);
    if (items.empty())
      throw ConfigError(k.name, "expected a nonempty list");
    for (const auto &s : items) {
      long v;
      if (!parse_integer(s, v))
        throw ConfigError(k.name, "expected an integer, got '" + s + "'");
      check_number(k, static_cast<double>(v));
    }
    break;
  }
  case ValueType::word:
    if (value.empty())
      throw ConfigError(k.name, "empty value");
    if (!k.choices.empty() &&
        std::find(k.choices.begin(), k.choices.end(), value) == k.choices.end()) {
      std::string all;
      for (const auto &c : k.choices)
        all += (all.empty() ? "" : "|") + c;
      throw ConfigError(k.name, "expected one of " + all + ", got '" + value + "'");
    }
    break;
  case ValueType::word_list:
    break;
  case ValueType::flag:
    if (value != "on" && value != "off")
      throw ConfigError(k.name, "expected on|off, got '" + value + "'");
    break;
  }
}

KeySpec real_key(std::string name, std::string def, double lo, double hi,
                 std::string doc, bool lo_exclusive = false) {
  KeySpec k{std::move(name), ValueType::real, std::move(def), lo, hi, {},
            std::move(doc), lo_exclusive};
  return k;
}

KeySpec int_key(std::string name, std::string def, double lo, double hi,
                std::string doc) {
  return {std::move(name), ValueType::integer, std::move(def), lo, hi, {},
          std::move(doc)};
}

KeySpec word_key(std::string name, std::string def,
                 std::vector<std::string> choices, std::string doc) {
  return {std::move(name), ValueType::word, std::move(def), 0, 0,
          std::move(choices), std::move(doc)};
}

KeySpec flag_key(std::string name, std::string def, std::string doc) {
  return {std::move(name), ValueType::flag, std::move(def), 0, 0, {},
          std::move(doc)};
}

constexpr double kInf = 1e300;

std::vector<KeySpec> common_keys() {
  return {
      word_key("command", "", {}, "experiment to run"),
      {"seeds", ValueType::integer_list, "1", 0, 9.2e18, {}, "comma-separated seed list"},
      int_key("workers", "1", 1, 256, "worker threads"),
      word_key("out", "out", {}, "output directory"),
      flag_key("plots", "off", "write SVG plots"),
  };
}

KeySpec hurst_key(std::string def) {
  return real_key("H", std::move(def), HurstIndex::kMin, HurstIndex::kMax,
                  "Hurst index");
}

std::map<std::string, std::vector<KeySpec>> build_schemas() {
  std::map<std::string, std::vector<KeySpec>> s;
  s["gen"] = {
      hurst_key(""),
      word_key("generator", "circulant", {"circulant", "cholesky"}, "path generator"),
      int_key("n", "1024", 2, 1 << 24, "circulant steps (power of two) or cholesky points"),
      real_key("dt", "1/1024", 0, kInf, "circulant step", true),
      word_key("grid", "uniform", {"uniform", "geometric"}, "cholesky grid"),
      real_key("t_lo", "0.001", 0, kInf, "geometric grid start", true),
      real_key("t_hi", "1", 0, kInf, "cholesky grid end", true),
      int_key("n_paths", "1", 1, 1e7, "paths per seed"),
  };
  s["lambda"] = {
      hurst_key("0.5"),
      real_key("theta", "", 0, kInf, "barrier level", true),
      real_key("fit_lo", "2^-9", 0, 1, "smallest fit scale", true),
      real_key("fit_hi", "2^-4", 0, 1, "largest fit scale", true),
      int_key("fit_points", "6", 3, 1000, "geometric fit ladder size"),
      real_key("h_hi", "1", 0, 1, "top of the constraint window", true),
      real_key("points_per_decade", "32", 16, 10000, "monitoring density"),
      word_key("target", "path_B", {"path_B", "localized_D"}, "process monitored"),
      real_key("alpha", "0.7", 0, 1, "localization exponent", true),
      real_key("t", "1", 0, kInf, "base time for localized_D", true),
      word_key("monitoring", "auto", {"auto", "discrete", "bridge"}, "crossing monitor"),
      int_key("n_paths", "200000", 100, 1e9, "paths"),
      int_key("pilot_paths", "4000", 100, 1e8, "pilot paths for preflight"),
      real_key("min_expected_survivors", "50", 0, kInf, "preflight threshold"),
      real_key("ci_inflation", "1.5", 1, 100, "stderr inflation for the slope CI"),
  };
  s["localize"] = {
      hurst_key(""),
      real_key("alpha", "0.7", 0, 1, "localization exponent", true),
      word_key("mode", "l2", {"l2", "sup"}, "error norm"),
      real_key("t", "1", 0, kInf, "base time (l2)", true),
      real_key("t_lo", "1", 0, kInf, "window start (sup)", true),
      real_key("t_hi", "2", 0, kInf, "window end (sup)", true),
      real_key("h_lo", "2^-10", 0, 1, "smallest scale", true),
      real_key("h_hi", "2^-3", 0, 1, "largest scale", true),
      int_key("h_points", "8", 6, 1000, "geometric scale ladder size"),
      int_key("n_paths", "400", 10, 1e8, "paths"),
      int_key("t_points", "32", 2, 100000, "lattice times (sup)"),
      real_key("points_per_decade", "8", 1, 1000, "lattice scale density (sup)"),
      real_key("growth", "0.05", 0, 1, "cell growth factor", true),
  };
  s["moduli"] = {
      hurst_key(""),
      real_key("alpha", "0.7", 0, 1, "localization exponent", true),
      real_key("t_lo", "1", 0, kInf, "base time", true),
      real_key("t_hi", "1.5", 0, kInf, "largest second time", true),
      real_key("h", "0.01", 0, 1, "scale for time pairs", true),
      real_key("h_lo", "0.001", 0, 1, "smallest scale for scale pairs", true),
      real_key("h_hi", "0.1", 0, 1, "largest scale for scale pairs", true),
      int_key("pairs", "8", 1, 10000, "pairs of each kind"),
      int_key("n_paths", "2000", 10, 1e8, "paths"),
  };
  s["slowdim"] = {
      hurst_key("0.5"),
      int_key("log2_n", "18", 4, 26, "circulant steps as a power of two"),
      real_key("dt", "2^-16", 0, kInf, "path step", true),
      real_key("t_lo", "1", 0, kInf, "scan window start"),
      real_key("t_hi", "2", 0, kInf, "scan window end", true),
      int_key("lag_min", "1", 1, 1e9, "smallest lag in steps"),
      int_key("lag_max", "1024", 1, 1e9, "largest lag in steps"),
      real_key("lags_per_decade", "128", 1, 1e6, "lag density"),
      {"theta", ValueType::real_list, "", 0, kInf, {}, "level list", true},
      int_key("box_min", "4", 1, 1e9, "smallest box in steps"),
      int_key("box_max", "512", 1, 1e9, "largest box in steps"),
      word_key("set", "interval", {"interval", "cantor"}, "compact set K"),
      int_key("cantor_maps", "2", 2, 1000, "Cantor pieces per level"),
      real_key("cantor_ratio", "1/3", 0, 1, "Cantor contraction", true),
      int_key("cantor_depth", "8", 0, 14, "Cantor depth"),
      flag_key("write_scan", "on", "write slow_scan.csv"),
  };
  s["xstat"] = {
      hurst_key("0.5"),
      real_key("alpha", "0.7", 0, 1, "localization exponent", true),
      real_key("theta", "1.5", 0, kInf, "barrier level", true),
      real_key("h2", "2^-3", 0, 1, "coarse scale", true),
      real_key("h1_ratio", "2^-3", 0, 1, "h1 / h2", true),
      word_key("set", "cantor", {"interval", "cantor"}, "compact set K"),
      real_key("t_lo", "1", 0, kInf, "K start", true),
      real_key("t_hi", "2", 0, kInf, "K end", true),
      int_key("cantor_maps", "2", 2, 1000, "Cantor pieces per level"),
      real_key("cantor_ratio", "1/3", 0, 1, "Cantor contraction", true),
      int_key("cantor_depth", "6", 0, 14, "Cantor depth (atoms = maps^depth)"),
      int_key("interval_atoms", "64", 1, 100000, "atoms for an interval K"),
      int_key("n_paths", "2000", 2, 1e8, "evaluation paths per seed"),
      int_key("n_calibration", "5000", 10, 1e8, "calibration paths per seed"),
      real_key("points_per_decade", "32", 1, 1000, "monitoring density"),
      flag_key("pool_atoms", "off", "share one probability across atoms"),
  };
  s["report"] = {
      {"manifests", ValueType::word_list, "", 0, 0, {}, "comma-separated manifest paths"},
  };
  return s;
}

const std::map<std::string, std::vector<KeySpec>> &schemas() {
  static const auto s = build_schemas();
  return s;
}

std::vector<std::uint64_t> parse_seeds(const std::string &key,
                                       const std::string &text) {
  std::vector<std::uint64_t> out;
  for (const auto &s : split_list(text)) {
    std::uint64_t v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
      throw ConfigError(key, "expected a nonnegative integer seed, got '" + s + "'");
    if (std::find(out.begin(), out.end(), v) != out.end())
      throw ConfigError(key, "duplicate seed " + s);
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError(key, "empty seed list");
  return out;
}

void require(bool ok, const std::string &key, const std::string &message) {
  if (!ok)
    throw ConfigError(key, message);
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

// Module preconditions that involve more than one key.
void cross_check(const ExperimentConfig &c) {
  const std::string &cmd = c.command;
  if (cmd == "gen") {
    if (c.word("generator") == "circulant") {
      require(is_power_of_two(c.integer("n")), "n", "circulant needs a power of two");
    } else {
      require(c.integer("n") <= 4096, "n", "cholesky grid is capped at 4096 points");
      if (c.word("grid") == "geometric")
        require(c.real("t_lo") < c.real("t_hi"), "t_lo", "must be below t_hi");
    }
  } else if (cmd == "lambda") {
    require(c.real("fit_lo") < c.real("fit_hi"), "fit_lo", "must be below fit_hi");
    require(c.real("fit_hi") <= c.real("h_hi"), "fit_hi", "must not exceed h_hi");
    const bool d = c.word("target") == "localized_D";
    if (d)
      require(c.real("h_hi") <= std::pow(c.real("t"), 1.0 / c.real("alpha")), "h_hi",
              "localized target needs h_hi <= t^(1/alpha)");
    if (c.word("monitoring") == "bridge")
      require(c.real("H") == 0.5 && !d, "monitoring",
              "bridge correction needs H = 0.5 and target path_B");
    require(c.integer("pilot_paths") <= c.integer("n_paths"), "pilot_paths",
            "must not exceed n_paths");
  } else if (cmd == "localize") {
    require(c.real("h_lo") < c.real("h_hi"), "h_lo", "must be below h_hi");
    const double a = c.real("alpha");
    if (c.word("mode") == "l2") {
      require(c.real("h_hi") <= std::pow(c.real("t"), 1.0 / a), "h_hi",
              "needs h_hi <= t^(1/alpha)");
    } else {
      require(c.real("t_lo") < c.real("t_hi"), "t_lo", "must be below t_hi");
      require(c.real("h_hi") <= std::min(std::pow(c.real("t_lo"), 1.0 / a),
                                         std::exp(-1.0)),
              "h_hi", "needs h_hi <= min(t_lo^(1/alpha), 1/e)");
    }
  } else if (cmd == "moduli") {
    require(c.real("t_lo") < c.real("t_hi"), "t_lo", "must be below t_hi");
    require(c.real("h_lo") < c.real("h_hi"), "h_lo", "must be below h_hi");
    const double lim = std::pow(c.real("t_lo"), 1.0 / c.real("alpha"));
    require(c.real("h") <= lim, "h", "needs h <= t_lo^(1/alpha)");
    require(c.real("h_hi") <= lim, "h_hi", "needs h_hi <= t_lo^(1/alpha)");
  } else if (cmd == "slowdim") {
    const double dt = c.real("dt");
    const double T = dt * std::ldexp(1.0, static_cast<int>(c.integer("log2_n")));
    require(c.real("t_lo") < c.real("t_hi"), "t_lo", "must be below t_hi");
    require(c.integer("lag_min") <= c.integer("lag_max"), "lag_min",
            "must not exceed lag_max");
    require(c.real("t_hi") + dt * static_cast<double>(c.integer("lag_max")) <= T,
            "t_hi", "t_hi + lag_max*dt must lie inside the simulated path");
    const double r_lo = c.real("t_lo") / dt, r_hi = c.real("t_hi") / dt;
    require(std::abs(r_lo - std::round(r_lo)) < 1e-9 * std::max(1.0, r_lo), "t_lo",
            "must be a multiple of dt");
    require(std::abs(r_hi - std::round(r_hi)) < 1e-9 * std::max(1.0, r_hi), "t_hi",
            "must be a multiple of dt");
    require(c.integer("box_min") < c.integer("box_max"), "box_min",
            "must be below box_max");
    require(c.integer("box_max") >= 4 * c.integer("box_min"), "box_max",
            "needs at least three box sizes (box_max >= 4 box_min)");
    if (c.word("set") == "cantor") {
      require(c.real("cantor_ratio") * static_cast<double>(c.integer("cantor_maps")) <= 1,
              "cantor_ratio", "pieces overlap (maps * ratio > 1)");
      const double res = std::pow(c.real("cantor_ratio"),
                                  static_cast<double>(c.integer("cantor_depth"))) *
                         (c.real("t_hi") - c.real("t_lo"));
      require(res <= 2 * dt * static_cast<double>(c.integer("box_min")), "cantor_depth",
              "Cantor resolution must not exceed twice the smallest box");
    }
  } else if (cmd == "xstat") {
    require(c.real("t_lo") < c.real("t_hi"), "t_lo", "must be below t_hi");
    require(c.real("h1_ratio") < 1, "h1_ratio", "must be below 1");
    if (c.word("set") == "cantor")
      require(c.real("cantor_ratio") * static_cast<double>(c.integer("cantor_maps")) <= 1,
              "cantor_ratio", "pieces overlap (maps * ratio > 1)");
  }
}

} // namespace

RawConfig parse_config_text(const std::string &text) {
  RawConfig out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno), "missing key");
    for (const auto &kv : out)
      if (kv.first == key)
        throw ConfigError(key, "given twice");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

RawConfig read_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names = {
      "gen", "lambda", "localize", "moduli", "slowdim", "xstat", "report"};
  return names;
}

const std::vector<KeySpec> &command_schema(const std::string &command) {
  const auto it = schemas().find(command);
  if (it == schemas().end())
    throw ConfigError("command", "unknown command '" + command + "'");
  return it->second;
}

void ExperimentConfig::set_value(const std::string &key, const std::string &value) {
  values_[key] = value;
}

namespace {
const std::string &lookup(const std::map<std::string, std::string> &m,
                          const std::string &key) {
  const auto it = m.find(key);
  if (it == m.end())
    throw ConfigError(key, "not part of this command's schema");
  return it->second;
}
} // namespace

double ExperimentConfig::real(const std::string &key) const {
  double v = 0;
  parse_real(lookup(values_, key), v);
  return v;
}

long ExperimentConfig::integer(const std::string &key) const {
  long v = 0;
  parse_integer(lookup(values_, key), v);
  return v;
}

std::vector<double> ExperimentConfig::real_list(const std::string &key) const {
  std::vector<double> out;
  for (const auto &s : split_list(lookup(values_, key))) {
    double v = 0;
    parse_real(s, v);
    out.push_back(v);
  }
  return out;
}

std::vector<long> ExperimentConfig::integer_list(const std::string &key) const {
  std::vector<long> out;
  for (const auto &s : split_list(lookup(values_, key))) {
    long v = 0;
    parse_integer(s, v);
    out.push_back(v);
  }
  return out;
}

const std::string &ExperimentConfig::word(const std::string &key) const {
  return lookup(values_, key);
}

std::vector<std::string> ExperimentConfig::word_list(const std::string &key) const {
  const std::string &v = lookup(values_, key);
  if (v.empty())
    return {};
  return split_list(v);
}

bool ExperimentConfig::flag(const std::string &key) const {
  return lookup(values_, key) == "on";
}

ExperimentConfig build_config(const RawConfig &raw, const Overrides &ov) {
  std::map<std::string, std::string> given;
  for (const auto &kv : raw)
    given[kv.first] = kv.second;
  if (!given.count("command"))
    throw ConfigError("command", "missing");
  const std::string command = given["command"];
  if (std::find(command_names().begin(), command_names().end(), command) ==
      command_names().end())
    throw ConfigError("command", "unknown command '" + command + "'");

  std::vector<KeySpec> keys = common_keys();
  for (const auto &k : command_schema(command))
    keys.push_back(k);

  if (!ov.out.empty())
    given["out"] = ov.out;
  if (!ov.workers.empty())
    given["workers"] = ov.workers;
  if (!ov.seed_list.empty())
    given["seeds"] = ov.seed_list;
  if (!ov.plots.empty())
    given["plots"] = ov.plots;

  for (const auto &kv : given) {
    const bool known = std::any_of(keys.begin(), keys.end(),
                                   [&](const KeySpec &k) { return k.name == kv.first; });
    if (!known)
      throw ConfigError(kv.first, "unknown key for command '" + command + "'");
  }

  ExperimentConfig cfg;
  cfg.command = command;
  for (const auto &k : keys) {
    auto it = given.find(k.name);
    std::string value;
    if (it != given.end()) {
      value = it->second;
    } else if (!k.default_value.empty() || k.type == ValueType::word_list) {
      value = k.default_value;
    } else {
      throw ConfigError(k.name, "required");
    }
    if (k.name != "seeds")
      check_value(k, value);
    cfg.set_value(k.name, value);
    cfg.append_echo(k.name, value);
  }
  cfg.seeds = parse_seeds("seeds", cfg.word("seeds"));
  cfg.workers = static_cast<int>(cfg.integer("workers"));
  cfg.out_dir = cfg.word("out");
  cfg.plots = cfg.flag("plots");
  cross_check(cfg);
  return cfg;
}

std::string schema_help() {
  std::ostringstream os;
  os << "Config files hold one 'key = value' per line; '#' starts a comment.\n"
        "Lists are comma-separated; reals accept a/b and a^b.\n\nCommon keys:\n";
  auto put = [&](const KeySpec &k) {
    os << "  " << k.name;
    if (!k.default_value.empty())
      os << " = " << k.default_value;
    else if (k.type != ValueType::word_list)
      os << " (required)";
    if (!k.choices.empty()) {
      os << "  {";
      for (std::size_t i = 0; i < k.choices.size(); ++i)
        os << (i ? "|" : "") << k.choices[i];
      os << "}";
    }
    os << "  " << k.doc << "\n";
  };
  for (const auto &k : common_keys())
    put(k);
  for (const auto &name : command_names()) {
    os << "\ncommand = " << name << "\n";
    for (const auto &k : command_schema(name))
      put(k);
  }
  return os.str();
}

} // namespace fbmlab::harness
