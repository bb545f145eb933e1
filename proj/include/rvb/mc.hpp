#pragma once

#include "rvb/lattice.hpp"
#include "rvb/rng.hpp"
#include "rvb/vbstate.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rvb {

struct McConfig {
  int L = 4;
  Boundary bc = Boundary::Periodic;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> n_therm;  // default max(10^4, 100 L)
  std::int64_t n_sweeps = 100000;
  int n_bins = 100;
  // Shares of all proposals; plaquette flips take the remainder, which must be positive.
  double winding_fraction = 0.1;
  double worm_fraction = 0.01;
  bool allow_sector_freezing = false;  // required when both shares above are 0

  /// Throws ValidationError on any inconsistency.
  void validate() const;
  std::int64_t thermalization_sweeps() const;
  /// A sweep is L^2 plaquette proposals plus these many line-shift and worm proposals.
  std::int64_t winding_proposals_per_sweep() const;
  std::int64_t worm_proposals_per_sweep() const;
};

struct UpdateCounter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

struct Winding {
  int wx = 0;
  int wy = 0;
  friend auto operator<=>(const Winding&, const Winding&) = default;
};

/// Staggered dimer flux through the cut between columns 0 and 1 (wx) and
/// rows 0 and 1 (wy). Conserved by plaquette flips on the torus.
Winding compute_winding(const Lattice& lat, std::span<const int> match);

/// Columnar covering: every row paired (0,1), (2,3), ...
std::vector<int> columnar_covering(const Lattice& lat);

struct FlipOutcome {
  bool eligible = false;
  int delta_loops = 0;
  bool accepted = false;
};

/// Pair of nearest-neighbour coverings sampled with weight 2^{N_l}.
class McState {
 public:
  /// Both replicas columnar, RNG seeded from cfg.seed.
  explicit McState(const McConfig& cfg);

  const Lattice& lattice() const { return lattice_; }
  std::span<const int> replica(int r) const { return r == 0 ? std::span<const int>(a_) : std::span<const int>(b_); }
  DimerCovering covering(int r) const;
  int n_loops() const { return n_loops_; }
  int log2_weight() const { return n_loops_ - lattice_.n_sites() / 2; }
  Winding winding(int r) const { return winding_[r]; }
  LoopDecomposition loops() const;
  const Rng& rng() const { return rng_; }

  /// Replaces both replicas (validated) and recomputes loops and windings.
  void set_replicas(std::vector<int> a, std::vector<int> b);

  /// Random plaquette proposal in a random replica.
  bool plaquette_update();
  /// Deterministic proposal at replica r, plaquette q; accepts iff u < 2^delta.
  FlipOutcome propose_plaquette(int r, int q, double u);

  /// Random straight-line shift proposal (periodic only).
  bool winding_update();
  /// Deterministic proposal: replica r, horizontal row (vertical = false) or
  /// column, line index; accepts iff u < 2^delta.
  FlipOutcome propose_line_shift(int r, bool vertical, int line, double u);

  /// Free-dimer worm in a random replica from a random tail site: the head
  /// hops to a uniformly chosen neighbour, bonds to it, and frees that
  /// site's old partner, until it returns to the tail. The proposal is
  /// symmetric; acceptance is min(1, 2^delta) from a full loop recount.
  bool worm_update();

  void sweep();

  /// Loop-estimator value averaged over all nearest-neighbour bonds.
  double measure() const;

  const UpdateCounter& plaquette_counter() const { return plaquette_stats_; }
  const UpdateCounter& winding_counter() const { return winding_stats_; }
  const UpdateCounter& worm_counter() const { return worm_stats_; }

  friend bool operator==(const McState& x, const McState& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.n_loops_ == y.n_loops_ && x.rng_ == y.rng_ &&
           x.winding_ == y.winding_;
  }

 private:
  std::vector<int>& mutable_replica(int r) { return r == 0 ? a_ : b_; }
  // Number of distinct loops of (a, b) passing through `sites`.
  int loops_through(std::span<const int> a, std::span<const int> b, std::span<const int> sites);

  McConfig cfg_;
  Lattice lattice_;
  std::vector<int> a_;
  std::vector<int> b_;
  int n_loops_ = 0;
  std::array<Winding, 2> winding_{};
  Rng rng_;
  std::int64_t winding_per_sweep_ = 0;
  std::int64_t worm_per_sweep_ = 0;
  // worm scratch space
  std::vector<unsigned> stamp_;
  unsigned epoch_ = 0;
  std::vector<std::pair<int, int>> touched_;
  std::vector<std::pair<int, int>> changed_;
  std::vector<int> changed_sites_;
  UpdateCounter plaquette_stats_;
  UpdateCounter winding_stats_;
  UpdateCounter worm_stats_;
};

struct McResult {
  McConfig config;
  std::vector<std::uint64_t> seeds;  // one per merged chain
  std::int64_t samples_per_bin = 0;
  std::vector<double> bin_series;
  double corr_mean = 0.0;
  double corr_err = 0.0;
  double p_mean = 0.0;
  double p_err = 0.0;
  double tau_int = 0.0;  // integrated autocorrelation time in sweeps
  double first_half_mean = 0.0;
  double second_half_mean = 0.0;
  // raw sample moments, kept for merging
  double raw_sum = 0.0;
  double raw_sum_sq = 0.0;
  std::int64_t n_samples = 0;
  UpdateCounter plaquette;
  UpdateCounter winding;
  UpdateCounter worm;
  std::map<Winding, std::uint64_t> sector_histogram;  // both replicas, one entry per measurement
  std::string rng_algorithm;
  std::string code_version;
};

struct BinStats {
  double mean = 0.0;
  double err = 0.0;  // population std of bin means / sqrt(n_bins - 1)
};

/// Throws std::runtime_error on non-finite bins.
BinStats bin_statistics(std::span<const double> bins);

McResult run_chain(const McConfig& cfg);

/// Associative fold of two chains with the same L, boundary and bin size.
McResult merge_results(const McResult& x, const McResult& y);

}  // namespace rvb
