#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbmlab::harness {

// Validation failure tied to one configuration key (exit status 2).
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string &message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string &key() const { return key_; }

private:
  std::string key_;
};

enum class ValueType { real, integer, real_list, integer_list, word, word_list, flag };

struct KeySpec {
  std::string name;
  ValueType type;
  std::string default_value; // empty: required
  double min = -1e300;
  double max = 1e300;
  std::vector<std::string> choices; // for words
  std::string doc;
  bool min_exclusive = false;
};

// Ordered key = value pairs as read from a file.
using RawConfig = std::vector<std::pair<std::string, std::string>>;

RawConfig parse_config_text(const std::string &text);
RawConfig read_config_file(const std::string &path);

class ExperimentConfig {
public:
  std::string command;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  std::string out_dir = "out";
  bool plots = false;

  double real(const std::string &key) const;
  long integer(const std::string &key) const;
  std::vector<double> real_list(const std::string &key) const;
  std::vector<long> integer_list(const std::string &key) const;
  const std::string &word(const std::string &key) const;
  std::vector<std::string> word_list(const std::string &key) const;
  bool flag(const std::string &key) const;
  bool has(const std::string &key) const { return values_.count(key) != 0; }

  // Every key after defaults are applied, in schema order.
  const std::vector<std::pair<std::string, std::string>> &echo() const {
    return echo_;
  }

  void set_value(const std::string &key, const std::string &value);
  void append_echo(const std::string &key, const std::string &value) {
    echo_.emplace_back(key, value);
  }

private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, std::string>> echo_;
};

const std::vector<std::string> &command_names();
const std::vector<KeySpec> &command_schema(const std::string &command);

// Overrides from flags or environment; empty optionals are ignored.
struct Overrides {
  std::string out;
  std::string workers;
  std::string seed_list;
  std::string plots;
};

// Applies schema defaults and overrides, type-checks every value, checks
// ranges and cross-key constraints. Throws ConfigError naming the key.
ExperimentConfig build_config(const RawConfig &raw, const Overrides &ov = {});

std::string schema_help();

} // namespace fbmlab::harness
