#include "rvb/exact.hpp"

#include "rvb/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <thread>

namespace rvb {

std::string_view to_string(Ensemble e) { return e == Ensemble::NNLiquid ? "nn_liquid" : "bipartite_gas"; }

namespace {

void extend_coverings(const Lattice& lat, std::vector<int>& match, int next, EnumerationResult& out) {
  const int n = lat.n_sites();
  while (next < n && match[next] >= 0) ++next;
  if (next == n) {
    out.coverings.push_back(DimerCovering::nearest_neighbour(lat, match));
    return;
  }
  for (int d = 0; d < 4; ++d) {
    const int t = lat.neighbour(next, static_cast<Direction>(d));
    if (t < 0 || match[t] >= 0) continue;
    match[next] = t;
    match[t] = next;
    extend_coverings(lat, match, next + 1, out);
    match[next] = -1;
    match[t] = -1;
  }
}

// Row filling for the transfer matrix: `covered` marks sites already taken by
// vertical dimers from the row below; emits each resulting upward mask.
template <class Emit>
void fill_row(int L, bool allow_up, int x, unsigned covered, unsigned up, Emit&& emit) {
  while (x < L && (covered >> x & 1u)) ++x;
  if (x == L) {
    emit(up);
    return;
  }
  if (allow_up) fill_row(L, allow_up, x + 1, covered | 1u << x, up | 1u << x, emit);
  if (x + 1 < L && !(covered >> (x + 1) & 1u)) fill_row(L, allow_up, x + 2, covered | 3u << x, up, emit);
}

}  // namespace

EnumerationResult enumerate_nn_coverings(const Lattice& lat) {
  const int limit = lat.boundary() == Boundary::Periodic ? kMaxEnumeratedPeriodicL : kMaxEnumeratedOpenL;
  if (lat.size() > limit)
    throw ResourceGuardError("refusing to enumerate coverings of a " + std::to_string(lat.size()) + "x" +
                             std::to_string(lat.size()) + " " + std::string(to_string(lat.boundary())) +
                             " lattice (limit L = " + std::to_string(limit) + ")");
  EnumerationResult out;
  out.sublattice = lat.sublattices();
  std::vector<int> match(lat.n_sites(), -1);
  extend_coverings(lat, match, 0, out);
  return out;
}

mpz_class count_nn_coverings_transfer(int L, Boundary bc) {
  Lattice(L, bc);  // validates
  if (L > 20) throw ResourceGuardError("transfer matrix row state too large");
  const bool periodic = bc == Boundary::Periodic;
  const unsigned n_states = 1u << L;

  // T[in] -> list of (out, multiplicity)
  std::vector<std::vector<std::pair<unsigned, unsigned long>>> transfer(n_states);
  for (unsigned in = 0; in < n_states; ++in) {
    std::vector<unsigned long> counts(n_states, 0);
    auto emit = [&](unsigned up) { ++counts[up]; };
    fill_row(L, true, 0, in, 0u, emit);
    const unsigned wrap = 1u | 1u << (L - 1);
    if (periodic && (in & wrap) == 0) fill_row(L, true, 0, in | wrap, 0u, emit);
    for (unsigned out = 0; out < n_states; ++out)
      if (counts[out]) transfer[in].emplace_back(out, counts[out]);
  }

  auto propagate = [&](std::vector<mpz_class> v) {
    for (int row = 0; row < L; ++row) {
      std::vector<mpz_class> next(n_states, 0);
      for (unsigned in = 0; in < n_states; ++in) {
        if (v[in] == 0) continue;
        for (auto [out, mult] : transfer[in]) next[out] += v[in] * mult;
      }
      v = std::move(next);
    }
    return v;
  };

  if (!periodic) {
    std::vector<mpz_class> v(n_states, 0);
    v[0] = 1;
    return propagate(std::move(v))[0];
  }
  mpz_class trace = 0;
  for (unsigned s = 0; s < n_states; ++s) {
    std::vector<mpz_class> v(n_states, 0);
    v[s] = 1;
    trace += propagate(std::move(v))[s];
  }
  return trace;
}

std::vector<std::uint8_t> gas_sublattice(int N) {
  std::vector<std::uint8_t> sub(2 * N);
  for (int s = 0; s < 2 * N; ++s) sub[s] = static_cast<std::uint8_t>(s & 1);
  return sub;
}

EnumerationResult enumerate_bipartite_pairings(int N) {
  if (N < 1 || N > kMaxGasN)
    throw ValidationError("gas size N must lie in [1, " + std::to_string(kMaxGasN) + "], got " + std::to_string(N));
  EnumerationResult out;
  out.sublattice = gas_sublattice(N);
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<int> match(2 * N);
    for (int k = 0; k < N; ++k) {
      match[2 * k] = 2 * perm[k] + 1;
      match[2 * perm[k] + 1] = 2 * k;
    }
    out.coverings.push_back(DimerCovering::bipartite(out.sublattice, std::move(match)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<Rational> exact_correlators(const EnumerationResult& configs, std::span<const std::pair<int, int>> pairs,
                                        unsigned threads) {
  const std::size_t m = configs.count();
  if (m == 0) throw ValidationError("exact_correlators: empty configuration set");
  if (m > kMaxDoubleSumCoverings)
    throw ResourceGuardError("refusing an O(M^2) double sum over M = " + std::to_string(m) + " configurations (limit " +
                             std::to_string(kMaxDoubleSumCoverings) + ")");
  const int n = configs.coverings.front().n_sites();
  for (auto [i, j] : pairs) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw ValidationError("invalid site pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }

  const int max_loops = n / 2;
  const std::size_t np = pairs.size();
  // Histograms over loop count k: partition function and same-loop events.
  struct Partial {
    std::vector<std::uint64_t> z;
    std::vector<std::uint64_t> same;  // [pair * (max_loops + 1) + k]
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, m));
  std::vector<Partial> partials(threads);

  auto work = [&](unsigned w) {
    Partial& part = partials[w];
    part.z.assign(max_loops + 1, 0);
    part.same.assign(np * (max_loops + 1), 0);
    std::vector<int> label(n);
    for (std::size_t a = w; a < m; a += threads) {
      const auto& ma = configs.coverings[a].match();
      for (std::size_t b = a; b < m; ++b) {
        const auto& mb = configs.coverings[b].match();
        std::fill(label.begin(), label.end(), -1);
        int loops = 0;
        for (int start = 0; start < n; ++start) {
          if (label[start] >= 0) continue;
          int s = start;
          do {
            label[s] = loops;
            label[ma[s]] = loops;
            s = mb[ma[s]];
          } while (s != start);
          ++loops;
        }
        const std::uint64_t mult = a == b ? 1 : 2;
        part.z[loops] += mult;
        for (std::size_t p = 0; p < np; ++p) {
          if (label[pairs[p].first] == label[pairs[p].second]) part.same[p * (max_loops + 1) + loops] += mult;
        }
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  auto weighted = [&](auto&& count_at) {
    mpz_class total = 0;
    for (int k = 0; k <= max_loops; ++k) {
      mpz_class c = 0;
      for (const auto& part : partials) c += mpz_class(static_cast<unsigned long>(count_at(part, k)));
      mpz_class w;
      mpz_mul_2exp(w.get_mpz_t(), c.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
      total += w;
    }
    return total;
  };

  const mpz_class z = weighted([](const Partial& p, int k) { return p.z[k]; });
  std::vector<Rational> out;
  out.reserve(np);
  for (std::size_t p = 0; p < np; ++p) {
    const mpz_class same = weighted([&](const Partial& part, int k) { return part.same[p * (max_loops + 1) + k]; });
    const int sign = configs.sublattice[pairs[p].first] == configs.sublattice[pairs[p].second] ? 3 : -3;
    Rational v(mpz_class(sign * same), mpz_class(4 * z));
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

std::vector<Rational> exact_bond_correlators(const Lattice& lat, const EnumerationResult& coverings, unsigned threads) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(lat.n_bonds());
  for (const Bond& b : lat.bonds()) pairs.emplace_back(b.first, b.second);
  return exact_correlators(coverings, pairs, threads);
}

ExactCorrelator exact_nn_correlator(const Lattice& lat, int i, int j) {
  const auto coverings = enumerate_nn_coverings(lat);
  const std::pair<int, int> pair{i, j};
  return {exact_correlators(coverings, std::span(&pair, 1)).front(), i, j, Ensemble::NNLiquid};
}

ExactCorrelator exact_gas_correlator(int N, bool same_sublattice) {
  if (same_sublattice && N < 2) throw ValidationError("same-sublattice gas correlator needs N >= 2");
  const auto pairings = enumerate_bipartite_pairings(N);
  const std::pair<int, int> pair{0, same_sublattice ? 2 : 1};
  return {exact_correlators(pairings, std::span(&pair, 1)).front(), pair.first, pair.second, Ensemble::BipartiteGas};
}

namespace {

// Unnormalised amplitudes: each singlet contributes |up_A down_B> - |down_A up_B>.
// Bit s of a basis index is 1 when spin s points up.
std::vector<long long> build_statevector(std::span<const DimerCovering> configs,
                                         std::span<const std::uint8_t> sublattice) {
  const int n = static_cast<int>(sublattice.size());
  std::vector<long long> psi(std::size_t{1} << n, 0);
  for (const auto& c : configs) {
    if (c.n_sites() != n) throw ValidationError("statevector: configuration size differs from sublattice labels");
    validate_matching(c.match(), sublattice);
    std::vector<std::pair<int, int>> singlets;  // (A site, B site)
    for (int s = 0; s < n; ++s)
      if (sublattice[s] == 0) singlets.emplace_back(s, c.partner(s));
    const int np = static_cast<int>(singlets.size());
    for (unsigned mask = 0; mask < (1u << np); ++mask) {
      std::size_t index = 0;
      int flips = 0;
      for (int k = 0; k < np; ++k) {
        const auto [a, b] = singlets[k];
        if (mask >> k & 1u) {
          index |= std::size_t{1} << a;
        } else {
          index |= std::size_t{1} << b;
          ++flips;
        }
      }
      psi[index] += (flips & 1) ? -1 : 1;
    }
  }
  return psi;
}

// <psi|S_i.S_j|psi>/<psi|psi> = (1/2) <P_ij> - 1/4 with P_ij the spin swap.
Rational swap_correlator(const std::vector<long long>& psi, const mpz_class& norm, int i, int j) {
  mpz_class swap_sum = 0;
  const std::size_t bi = std::size_t{1} << i;
  const std::size_t bj = std::size_t{1} << j;
  for (std::size_t x = 0; x < psi.size(); ++x) {
    if (psi[x] == 0) continue;
    std::size_t y = x;
    if (((x & bi) != 0) != ((x & bj) != 0)) y ^= bi | bj;
    swap_sum += mpz_class(static_cast<long>(psi[x])) * static_cast<long>(psi[y]);
  }
  Rational v(swap_sum, 2 * norm);
  v.canonicalize();
  return v - Rational(1, 4);
}

mpz_class norm_squared(const std::vector<long long>& psi) {
  mpz_class norm = 0;
  for (long long a : psi) norm += mpz_class(static_cast<long>(a)) * static_cast<long>(a);
  if (norm == 0) throw ValidationError("statevector: superposition vanishes");
  return norm;
}

void check_statevector_size(std::span<const DimerCovering> configs, std::span<const std::uint8_t> sublattice) {
  if (configs.empty()) throw ValidationError("statevector: no configurations");
  if (static_cast<int>(sublattice.size()) > kMaxStatevectorSites)
    throw ResourceGuardError("statevector oracle limited to " + std::to_string(kMaxStatevectorSites) + " sites");
}

}  // namespace

Rational statevector_oracle(std::span<const DimerCovering> configs, std::span<const std::uint8_t> sublattice, int i,
                            int j) {
  check_statevector_size(configs, sublattice);
  const int n = static_cast<int>(sublattice.size());
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw ValidationError("statevector: invalid site pair");
  const auto psi = build_statevector(configs, sublattice);
  return swap_correlator(psi, norm_squared(psi), i, j);
}

std::vector<std::vector<Rational>> statevector_correlation_matrix(std::span<const DimerCovering> configs,
                                                                  std::span<const std::uint8_t> sublattice) {
  check_statevector_size(configs, sublattice);
  const int n = static_cast<int>(sublattice.size());
  const auto psi = build_statevector(configs, sublattice);
  const mpz_class norm = norm_squared(psi);
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n, Rational(3, 4)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out[i][j] = out[j][i] = swap_correlator(psi, norm, i, j);
  return out;
}

SpinSums spin_sums(const std::vector<std::vector<Rational>>& corr, std::span<const std::uint8_t> sublattice) {
  SpinSums s;
  const int n = static_cast<int>(sublattice.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.total += corr[i][j];
      if (sublattice[i] == 0 && sublattice[j] == 0) s.a_squared += corr[i][j];
      if (sublattice[i] == 1 && sublattice[j] == 1) s.b_squared += corr[i][j];
      if (sublattice[i] == 0 && sublattice[j] == 1) s.a_dot_b += corr[i][j];
    }
  }
  return s;
}

}  // namespace rvb
