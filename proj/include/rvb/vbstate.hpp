#pragma once

#include "rvb/lattice.hpp"
#include "rvb/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rvb {

enum class CoveringKind { NearestNeighbour, FullBipartite };

/// A valence-bond configuration: a fixed-point-free involution on the sites
/// pairing every A site with a B site. Singlets are oriented A -> B, which
/// makes every overlap between two such states positive.
class DimerCovering {
 public:
  /// Nearest-neighbour covering of a lattice; every pair must be a bond.
  static DimerCovering nearest_neighbour(const Lattice& lat, std::vector<int> match);
  /// Arbitrary A <-> B pairing of abstract sites with the given sublattice labels.
  static DimerCovering bipartite(std::span<const std::uint8_t> sublattice, std::vector<int> match);

  const std::vector<int>& match() const { return match_; }
  int partner(int s) const { return match_[s]; }
  int n_sites() const { return static_cast<int>(match_.size()); }
  CoveringKind kind() const { return kind_; }

  friend bool operator==(const DimerCovering& a, const DimerCovering& b) { return a.match_ == b.match_; }

 private:
  DimerCovering(std::vector<int> match, CoveringKind kind) : match_(std::move(match)), kind_(kind) {}
  std::vector<int> match_;
  CoveringKind kind_;
};

/// Throws ValidationError unless `match` is a fixed-point-free involution
/// whose pairs join opposite sublattices.
void validate_matching(std::span<const int> match, std::span<const std::uint8_t> sublattice);

/// Loops of the transition graph of two matchings.
struct LoopDecomposition {
  int n_loops = 0;
  std::vector<int> loop_id;       // site -> loop label in [0, n_loops)
  std::vector<int> loop_lengths;  // indexed by label

  bool same_loop(int i, int j) const { return loop_id[i] == loop_id[j]; }
};

/// Decomposes the union of two matchings into closed alternating loops. A
/// dimer shared by both is a loop of length 2. Labels follow the order in
/// which the lowest site of each loop is met.
LoopDecomposition transition_graph(std::span<const int> a, std::span<const int> b);
LoopDecomposition transition_graph(const DimerCovering& a, const DimerCovering& b);

/// Loop count only; avoids allocating the label array.
int count_loops(std::span<const int> a, std::span<const int> b);

/// Overlap of two normalized VB states, 2^(n_loops - n_sites/2).
struct OverlapWeight {
  int log2_weight = 0;
  Rational value() const { return pow2(log2_weight); }
  double as_double() const;
};

OverlapWeight overlap_weight(const LoopDecomposition& loops, int n_sites);

/// <a|S_i.S_j|b>/<a|b> in units of 1/4: 0 for different loops, +3 on the same
/// loop and sublattice, -3 on the same loop and opposite sublattices.
int loop_estimator_quarters(const LoopDecomposition& loops, int i, int j, std::span<const std::uint8_t> sublattice);

double loop_estimator(const LoopDecomposition& loops, int i, int j, std::span<const std::uint8_t> sublattice);

/// Change in loop count when the dimers (s1,s2) and (s3,s4) of `changed` are
/// replaced by (s1,s3) and (s2,s4), with `other` held fixed. Walks the
/// affected loops from both ends in lockstep and stops at the first
/// decisive site, so the cost is bounded by the shorter walk.
int plaquette_flip_delta(std::span<const int> changed, std::span<const int> other, int s1, int s2, int s3, int s4);

}  // namespace rvb
