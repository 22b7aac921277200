#pragma once

#include <string>
#include <vector>

#include "fbmlab/fit.hpp"

namespace fbmlab {

enum class CompactKind { interval, ifs_cantor, finite_union };

const char *to_string(CompactKind kind);

struct Atom {
  double point;
  double weight;
};

// A compact set held as its depth-d representation: sorted, disjoint closed
// pieces, together with the natural probability measure on atoms.
struct CompactSetSpec {
  CompactKind kind = CompactKind::interval;
  std::vector<Interval> pieces;
  double known_hausdorff_dim = 0;
  double known_minkowski_dim = 0;
  std::vector<Atom> natural_measure;
  // Longest piece that stands for a finer structure (0 for exact pieces).
  double resolution = 0;

  int maps = 0;
  double ratio = 0;
  int depth = 0;

  double lo() const { return pieces.front().lo; }
  double hi() const { return pieces.back().hi; }
  bool contains(double t, double tol = 0) const;
};

// [a, b] with a >= 0; a == b is a single point. The measure is uniform on
// `atoms` cell midpoints.
CompactSetSpec make_interval(double a, double b, int atoms = 64);

// Self-similar Cantor set in [a, b]: m maps of ratio r, offsets i(1-r)/(m-1),
// cut at depth d. Requires m >= 2, 0 < r < 1, m r <= 1, d <= 14.
CompactSetSpec make_cantor(int m, double r, int depth, double a = 0.0,
                           double b = 1.0);

// Disjoint union; dimensions are the maxima, the measure gives each
// component equal mass.
CompactSetSpec make_union(const std::vector<CompactSetSpec> &parts);

// Size of the smallest set of centres such that every point of K lies within
// h of one of them (greedy left-to-right sweep, optimal on the line).
std::size_t packing_number(const CompactSetSpec &K, double h);

// Least-squares slope of log P_h(K) against log(1/h).
ExponentFit minkowski_dim_fit(const CompactSetSpec &K,
                              const std::vector<double> &h_ladder);

} // namespace fbmlab
