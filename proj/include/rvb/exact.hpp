#pragma once

#include "rvb/lattice.hpp"
#include "rvb/rational.hpp"
#include "rvb/vbstate.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rvb {

enum class Ensemble { NNLiquid, BipartiteGas };

std::string_view to_string(Ensemble e);

struct EnumerationResult {
  std::vector<DimerCovering> coverings;
  std::vector<std::uint8_t> sublattice;
  std::size_t count() const { return coverings.size(); }
};

struct ExactCorrelator {
  Rational value;
  int i = 0;
  int j = 0;
  Ensemble ensemble = Ensemble::NNLiquid;
};

/// Largest lattices whose nearest-neighbour coverings are materialised.
inline constexpr int kMaxEnumeratedPeriodicL = 6;
inline constexpr int kMaxEnumeratedOpenL = 6;
/// Largest covering set accepted by the O(M^2) correlator double sum.
inline constexpr std::size_t kMaxDoubleSumCoverings = 10000;
inline constexpr int kMaxGasN = 6;
inline constexpr int kMaxStatevectorSites = 10;

/// Every nearest-neighbour perfect matching of the lattice exactly once, by
/// backtracking on the lowest-index unmatched site (partners tried in bond
/// direction order +x, +y, -x, -y). Throws ResourceGuardError past the
/// enumeration size guard.
EnumerationResult enumerate_nn_coverings(const Lattice& lat);

/// Independent covering count by a row transfer matrix. Works for any
/// lattice size that fits a 2^L row state.
mpz_class count_nn_coverings_transfer(int L, Boundary bc);

/// Sublattice labels of the 2N abstract gas sites: even indices are A, odd are B.
std::vector<std::uint8_t> gas_sublattice(int N);

/// All N! pairings A_k <-> B_pi(k) of 2N abstract sites, in lexicographic
/// order of pi.
EnumerationResult enumerate_bipartite_pairings(int N);

/// Equal-amplitude superposition correlators for a list of site pairs:
/// sum_{a,b} 2^{N_l} E_ij / sum_{a,b} 2^{N_l}, computed exactly. The outer
/// index is split across `threads` workers (0 = hardware concurrency).
std::vector<Rational> exact_correlators(const EnumerationResult& configs, std::span<const std::pair<int, int>> pairs,
                                        unsigned threads = 0);

/// Exact correlator for every bond of the lattice, indexed like lat.bonds().
std::vector<Rational> exact_bond_correlators(const Lattice& lat, const EnumerationResult& coverings,
                                             unsigned threads = 0);

ExactCorrelator exact_nn_correlator(const Lattice& lat, int i, int j);

/// Gas correlator between sites A_0 and B_0 (opposite) or A_0 and A_1 (same).
ExactCorrelator exact_gas_correlator(int N, bool same_sublattice);

/// Brute-force expectation in the explicit 2^n-component state vector of
/// the equal-amplitude superposition of the given VB configurations, with
/// singlets oriented A -> B by `sublattice`.
Rational statevector_oracle(std::span<const DimerCovering> configs, std::span<const std::uint8_t> sublattice, int i,
                            int j);

/// All pair correlators from one state-vector build; entry [i][j] is
/// <S_i.S_j>, with the diagonal <S_i.S_i> = 3/4.
std::vector<std::vector<Rational>> statevector_correlation_matrix(std::span<const DimerCovering> configs,
                                                                  std::span<const std::uint8_t> sublattice);

/// Expectations of S_tot^2, S_A^2, S_B^2 and S_A.S_B assembled from a full
/// correlation matrix.
struct SpinSums {
  Rational total = 0;
  Rational a_squared = 0;
  Rational b_squared = 0;
  Rational a_dot_b = 0;
};

SpinSums spin_sums(const std::vector<std::vector<Rational>>& corr, std::span<const std::uint8_t> sublattice);

}  // namespace rvb
