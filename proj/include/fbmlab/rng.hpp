#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace fbmlab {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic stream keyed by (seed, stream_id). All Gaussian draws in the
// library go through normal().
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }
  void fill_normal(Eigen::Ref<Eigen::VectorXd> out);

  // Child stream for one unit of work (a path, a seed, an atom). Depends only
  // on this stream's key and the index, never on the draws consumed so far.
  RngStream substream(std::uint64_t index) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

RngStream make_rng(std::uint64_t seed, std::uint64_t stream_id);

// Role tags that keep pilot, calibration and evaluation draws apart.
enum class StreamRole : std::uint64_t {
  main = 1,
  pilot = 2,
  calibration = 3,
  evaluation = 4,
  resample = 5,
};

RngStream role_stream(const RngStream &base, StreamRole role);

} // namespace fbmlab
