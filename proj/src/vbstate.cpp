#include "rvb/vbstate.hpp"

#include "rvb/errors.hpp"

#include <cmath>
#include <string>

namespace rvb {

void validate_matching(std::span<const int> match, std::span<const std::uint8_t> sublattice) {
  const int n = static_cast<int>(match.size());
  if (static_cast<int>(sublattice.size()) != n) throw ValidationError("matching and sublattice sizes differ");
  for (int s = 0; s < n; ++s) {
    const int t = match[s];
    if (t < 0 || t >= n) throw ValidationError("site " + std::to_string(s) + " matched out of range");
    if (t == s) throw ValidationError("site " + std::to_string(s) + " matched to itself");
    if (match[t] != s) throw ValidationError("matching is not an involution at site " + std::to_string(s));
    if (sublattice[s] == sublattice[t])
      throw ValidationError("pair (" + std::to_string(s) + "," + std::to_string(t) + ") joins equal sublattices");
  }
}

DimerCovering DimerCovering::nearest_neighbour(const Lattice& lat, std::vector<int> match) {
  if (static_cast<int>(match.size()) != lat.n_sites()) throw ValidationError("covering size differs from lattice");
  validate_matching(match, lat.sublattices());
  for (int s = 0; s < lat.n_sites(); ++s) {
    if (lat.bond_index(s, match[s]) < 0)
      throw ValidationError("pair (" + std::to_string(s) + "," + std::to_string(match[s]) + ") is not a lattice bond");
  }
  return DimerCovering(std::move(match), CoveringKind::NearestNeighbour);
}

DimerCovering DimerCovering::bipartite(std::span<const std::uint8_t> sublattice, std::vector<int> match) {
  validate_matching(match, sublattice);
  return DimerCovering(std::move(match), CoveringKind::FullBipartite);
}

LoopDecomposition transition_graph(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ValidationError("transition_graph: matchings on different site counts");
  const int n = static_cast<int>(a.size());
  LoopDecomposition out;
  out.loop_id.assign(n, -1);
  for (int start = 0; start < n; ++start) {
    if (out.loop_id[start] >= 0) continue;
    const int label = out.n_loops++;
    int length = 0;
    int s = start;
    do {
      out.loop_id[s] = label;
      const int t = a[s];
      out.loop_id[t] = label;
      length += 2;
      s = b[t];
    } while (s != start);
    out.loop_lengths.push_back(length);
  }
  return out;
}

LoopDecomposition transition_graph(const DimerCovering& a, const DimerCovering& b) {
  return transition_graph(std::span<const int>(a.match()), std::span<const int>(b.match()));
}

int count_loops(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ValidationError("count_loops: matchings on different site counts");
  const int n = static_cast<int>(a.size());
  std::vector<char> seen(n, 0);
  int loops = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++loops;
    int s = start;
    do {
      seen[s] = 1;
      const int t = a[s];
      seen[t] = 1;
      s = b[t];
    } while (s != start);
  }
  return loops;
}

double OverlapWeight::as_double() const { return std::ldexp(1.0, log2_weight); }

OverlapWeight overlap_weight(const LoopDecomposition& loops, int n_sites) {
  int total = 0;
  for (int len : loops.loop_lengths) total += len;
  if (total != n_sites || n_sites % 2 != 0 || static_cast<int>(loops.loop_lengths.size()) != loops.n_loops)
    throw ValidationError("overlap_weight: site count inconsistent with loop decomposition");
  return {loops.n_loops - n_sites / 2};
}

int loop_estimator_quarters(const LoopDecomposition& loops, int i, int j, std::span<const std::uint8_t> sublattice) {
  if (i == j) throw ValidationError("loop_estimator: i == j");
  if (!loops.same_loop(i, j)) return 0;
  return sublattice[i] == sublattice[j] ? 3 : -3;
}

double loop_estimator(const LoopDecomposition& loops, int i, int j, std::span<const std::uint8_t> sublattice) {
  return 0.25 * loop_estimator_quarters(loops, i, j, sublattice);
}

int plaquette_flip_delta(std::span<const int> changed, std::span<const int> other, int s1, int s2, int s3, int s4) {
  // Walker 1 leaves s2 along `other`, walker 2 leaves s4 along `other`; both
  // alternate edges and inspect the site reached after each `other` step.
  // Loop order s1-s2..s3-s4 gives 0, s1-s2..s4-s3 gives +1, two loops give -1.
  int w1 = s2;
  int w2 = s4;
  for (;;) {
    w1 = other[w1];
    if (w1 == s1) return -1;
    if (w1 == s3) return 0;
    if (w1 == s4) return +1;
    w1 = changed[w1];

    w2 = other[w2];
    if (w2 == s3) return -1;
    if (w2 == s1) return 0;
    if (w2 == s2) return +1;
    w2 = changed[w2];
  }
}

}  // namespace rvb
