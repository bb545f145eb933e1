#include "rvb/mc.hpp"

#include "rvb/errors.hpp"
#include "rvb/version.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rvb {

void McConfig::validate() const {
  Lattice(L, bc);
  if (L < 4) throw ValidationError("Monte Carlo needs L >= 4");
  if (n_bins < 32) throw ValidationError("n_bins must be at least 32, got " + std::to_string(n_bins));
  if (n_sweeps <= 0 || n_sweeps % n_bins != 0)
    throw ValidationError("n_sweeps (" + std::to_string(n_sweeps) + ") must be a positive multiple of n_bins (" +
                          std::to_string(n_bins) + ")");
  if (n_therm && *n_therm < 0) throw ValidationError("n_therm must be non-negative");
  if (!(winding_fraction >= 0.0 && worm_fraction >= 0.0 && winding_fraction + worm_fraction < 1.0))
    throw ValidationError("update fractions must be non-negative and leave a positive plaquette share");
  if (winding_fraction == 0.0 && worm_fraction == 0.0 && !allow_sector_freezing)
    throw ValidationError("without line-shift or worm updates the winding sector is frozen; "
                          "pass allow_sector_freezing to accept that");
  if (bc == Boundary::Open && winding_fraction > 0.0)
    throw ValidationError("winding updates need periodic boundaries");
}

std::int64_t McConfig::thermalization_sweeps() const {
  return n_therm.value_or(std::max<std::int64_t>(10000, 100 * static_cast<std::int64_t>(L)));
}

namespace {

std::int64_t proposals_per_sweep(int L, double share, double plaquette_share) {
  if (share == 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(L * L * share / plaquette_share - 1e-9));
}

}  // namespace

std::int64_t McConfig::winding_proposals_per_sweep() const {
  return proposals_per_sweep(L, winding_fraction, 1.0 - winding_fraction - worm_fraction);
}

std::int64_t McConfig::worm_proposals_per_sweep() const {
  return proposals_per_sweep(L, worm_fraction, 1.0 - winding_fraction - worm_fraction);
}

Winding compute_winding(const Lattice& lat, std::span<const int> match) {
  Winding w;
  const int L = lat.size();
  for (int k = 0; k < L; ++k) {
    const int sign = (k & 1) ? -1 : 1;
    if (match[lat.site(0, k)] == lat.site(1, k)) w.wx += sign;
    if (match[lat.site(k, 0)] == lat.site(k, 1)) w.wy += sign;
  }
  return w;
}

std::vector<int> columnar_covering(const Lattice& lat) {
  std::vector<int> match(lat.n_sites());
  for (int y = 0; y < lat.size(); ++y) {
    for (int x = 0; x < lat.size(); x += 2) {
      match[lat.site(x, y)] = lat.site(x + 1, y);
      match[lat.site(x + 1, y)] = lat.site(x, y);
    }
  }
  return match;
}

McState::McState(const McConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      lattice_(cfg.L, cfg.bc),
      a_(columnar_covering(lattice_)),
      b_(a_),
      n_loops_(lattice_.n_sites() / 2),
      rng_(cfg.seed),
      winding_per_sweep_(cfg.winding_proposals_per_sweep()),
      worm_per_sweep_(cfg.worm_proposals_per_sweep()),
      stamp_(lattice_.n_sites(), 0u) {
  winding_[0] = winding_[1] = compute_winding(lattice_, a_);
}

DimerCovering McState::covering(int r) const {
  return DimerCovering::nearest_neighbour(lattice_, std::vector<int>(replica(r).begin(), replica(r).end()));
}

LoopDecomposition McState::loops() const { return transition_graph(a_, b_); }

void McState::set_replicas(std::vector<int> a, std::vector<int> b) {
  DimerCovering::nearest_neighbour(lattice_, a);
  DimerCovering::nearest_neighbour(lattice_, b);
  a_ = std::move(a);
  b_ = std::move(b);
  n_loops_ = count_loops(a_, b_);
  winding_[0] = compute_winding(lattice_, a_);
  winding_[1] = compute_winding(lattice_, b_);
}

FlipOutcome McState::propose_plaquette(int r, int q, double u) {
  auto& m = mutable_replica(r);
  const auto& other = r == 0 ? b_ : a_;
  const Plaquette& p = lattice_.plaquettes()[q];
  int s1, s2, s3, s4;
  if (m[p.s00] == p.s10 && m[p.s01] == p.s11) {
    s1 = p.s00, s2 = p.s10, s3 = p.s01, s4 = p.s11;
  } else if (m[p.s00] == p.s01 && m[p.s10] == p.s11) {
    s1 = p.s00, s2 = p.s01, s3 = p.s10, s4 = p.s11;
  } else {
    return {};
  }
  FlipOutcome out;
  out.eligible = true;
  out.delta_loops = plaquette_flip_delta(m, other, s1, s2, s3, s4);
  out.accepted = out.delta_loops >= 0 || u < 0.5;
  if (out.accepted) {
    m[s1] = s3, m[s3] = s1;
    m[s2] = s4, m[s4] = s2;
    n_loops_ += out.delta_loops;
  }
  return out;
}

bool McState::plaquette_update() {
  const int r = rng_.coin() ? 1 : 0;
  const int q = static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(lattice_.n_plaquettes())));
  const double u = rng_.uniform01();
  const FlipOutcome out = propose_plaquette(r, q, u);
  ++plaquette_stats_.proposed;
  if (out.accepted) ++plaquette_stats_.accepted;
  return out.accepted;
}

FlipOutcome McState::propose_line_shift(int r, bool vertical, int line, double u) {
  if (lattice_.boundary() != Boundary::Periodic) throw ValidationError("line shifts need periodic boundaries");
  const int L = lattice_.size();
  auto at = [&](int k) { return vertical ? lattice_.site(line, k) : lattice_.site(k, line); };
  auto& m = mutable_replica(r);
  for (int k = 0; k < L; ++k) {
    const int s = at(k);
    if (m[s] != at((k + 1) % L) && m[s] != at((k + L - 1) % L)) return {};
  }
  const bool phase0 = m[at(0)] == at(1);
  const std::vector<int> saved = m;
  for (int k = phase0 ? 1 : 0; k < L + (phase0 ? 1 : 0); k += 2) {
    const int s = at(k % L);
    const int t = at((k + 1) % L);
    m[s] = t;
    m[t] = s;
  }
  FlipOutcome out;
  out.eligible = true;
  const int new_loops = count_loops(a_, b_);
  out.delta_loops = new_loops - n_loops_;
  out.accepted = u < std::ldexp(1.0, out.delta_loops);
  if (out.accepted) {
    n_loops_ = new_loops;
    winding_[r] = compute_winding(lattice_, m);
  } else {
    m = saved;
  }
  return out;
}

bool McState::winding_update() {
  const int r = rng_.coin() ? 1 : 0;
  const bool vertical = rng_.coin();
  const int line = static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(lattice_.size())));
  const double u = rng_.uniform01();
  const FlipOutcome out = propose_line_shift(r, vertical, line, u);
  ++winding_stats_.proposed;
  if (out.accepted) ++winding_stats_.accepted;
  return out.accepted;
}

int McState::loops_through(std::span<const int> a, std::span<const int> b, std::span<const int> sites) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }
  int loops = 0;
  for (int start : sites) {
    if (stamp_[start] == epoch_) continue;
    ++loops;
    int s = start;
    do {
      stamp_[s] = epoch_;
      stamp_[a[s]] = epoch_;
      s = b[a[s]];
    } while (s != start);
  }
  return loops;
}

bool McState::worm_update() {
  const int r = rng_.coin() ? 1 : 0;
  auto& m = mutable_replica(r);
  const int n = lattice_.n_sites();
  const int tail = static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(n)));
  int head = m[tail];

  // (site, previous partner) for every site the worm touches, first touch only
  touched_.clear();
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }
  auto touch = [&](int s) {
    if (stamp_[s] != epoch_) {
      stamp_[s] = epoch_;
      touched_.emplace_back(s, m[s]);
    }
  };
  touch(tail);
  touch(head);
  m[tail] = m[head] = -1;

  std::array<int, 4> options{};
  const std::int64_t max_steps = 10000LL * n;
  bool closed = false;
  for (std::int64_t step = 0; step < max_steps; ++step) {
    int n_opt = 0;
    for (int d = 0; d < 4; ++d) {
      const int t = lattice_.neighbour(head, static_cast<Direction>(d));
      if (t >= 0) options[n_opt++] = t;
    }
    const int t = options[rng_.uniform_index(static_cast<std::uint64_t>(n_opt))];
    if (t == tail) {
      m[head] = tail;
      m[tail] = head;
      closed = true;
      break;
    }
    const int freed = m[t];
    touch(t);
    touch(freed);
    m[head] = t;
    m[t] = head;
    m[freed] = -1;
    head = freed;
  }

  ++worm_stats_.proposed;
  const double u = rng_.uniform01();
  auto revert = [&] {
    for (auto [s, partner] : touched_) m[s] = partner;
  };
  if (!closed) {
    revert();
    return false;
  }

  // sites whose partner changed, with their new partners
  changed_.clear();
  changed_sites_.clear();
  for (auto [s, partner] : touched_) {
    if (m[s] != partner) {
      changed_.emplace_back(s, m[s]);
      changed_sites_.push_back(s);
    }
  }
  if (changed_.empty()) {
    ++worm_stats_.accepted;
    return true;
  }
  const int after = loops_through(a_, b_, changed_sites_);
  revert();
  const int before = loops_through(a_, b_, changed_sites_);
  const int delta = after - before;
  if (u >= std::ldexp(1.0, delta)) return false;
  for (auto [s, partner] : changed_) m[s] = partner;
  n_loops_ += delta;
  winding_[r] = compute_winding(lattice_, m);
  ++worm_stats_.accepted;
  return true;
}

void McState::sweep() {
  const int n = lattice_.n_sites();
  for (int k = 0; k < n; ++k) plaquette_update();
  for (std::int64_t k = 0; k < winding_per_sweep_; ++k) winding_update();
  for (std::int64_t k = 0; k < worm_per_sweep_; ++k) worm_update();
}

double McState::measure() const {
  const int n = lattice_.n_sites();
  std::vector<int> label(n, -1);
  for (int start = 0, loops = 0; start < n; ++start) {
    if (label[start] >= 0) continue;
    int s = start;
    do {
      label[s] = loops;
      label[a_[s]] = loops;
      s = b_[a_[s]];
    } while (s != start);
    ++loops;
  }
  long long connected = 0;
  for (const Bond& b : lattice_.bonds())
    if (label[b.first] == label[b.second]) ++connected;
  // every nearest-neighbour bond joins opposite sublattices
  return -0.75 * static_cast<double>(connected) / static_cast<double>(lattice_.n_bonds());
}

BinStats bin_statistics(std::span<const double> bins) {
  if (bins.size() < 2) throw std::runtime_error("bin_statistics: need at least two bins");
  for (double b : bins)
    if (!std::isfinite(b)) throw std::runtime_error("bin_statistics: non-finite bin mean");
  const double nb = static_cast<double>(bins.size());
  const double mean = std::accumulate(bins.begin(), bins.end(), 0.0) / nb;
  double var = 0.0;
  for (double b : bins) var += (b - mean) * (b - mean);
  var /= nb;
  const BinStats s{mean, std::sqrt(var / (nb - 1.0))};
  if (!std::isfinite(s.err)) throw std::runtime_error("bin_statistics: non-finite error");
  return s;
}

namespace {

void finalize(McResult& res) {
  const BinStats s = bin_statistics(res.bin_series);
  res.corr_mean = s.mean;
  res.corr_err = s.err;
  res.p_mean = -4.0 / 3.0 * s.mean;
  res.p_err = 4.0 / 3.0 * s.err;

  const double n = static_cast<double>(res.n_samples);
  const double raw_mean = res.raw_sum / n;
  const double raw_var = std::max(0.0, res.raw_sum_sq / n - raw_mean * raw_mean);
  res.tau_int = raw_var > 0.0 ? 0.5 * s.err * s.err * n / raw_var : 0.0;

  const std::size_t half = res.bin_series.size() / 2;
  auto mean_of = [](auto first, auto last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(std::distance(first, last));
  };
  res.first_half_mean = mean_of(res.bin_series.begin(), res.bin_series.begin() + half);
  res.second_half_mean = mean_of(res.bin_series.begin() + half, res.bin_series.end());
}

}  // namespace

McResult run_chain(const McConfig& cfg) {
  McState state(cfg);
  const std::int64_t therm = cfg.thermalization_sweeps();
  for (std::int64_t s = 0; s < therm; ++s) state.sweep();

  McResult res;
  res.config = cfg;
  res.seeds = {cfg.seed};
  res.samples_per_bin = cfg.n_sweeps / cfg.n_bins;
  res.rng_algorithm = std::string(Rng::kAlgorithm);
  res.code_version = kCodeVersion;
  res.bin_series.reserve(cfg.n_bins);

  const UpdateCounter plaquette_before = state.plaquette_counter();
  const UpdateCounter winding_before = state.winding_counter();
  const UpdateCounter worm_before = state.worm_counter();
  for (int bin = 0; bin < cfg.n_bins; ++bin) {
    double bin_sum = 0.0;
    for (std::int64_t k = 0; k < res.samples_per_bin; ++k) {
      state.sweep();
      const double x = state.measure();
      bin_sum += x;
      res.raw_sum += x;
      res.raw_sum_sq += x * x;
      ++res.sector_histogram[state.winding(0)];
      ++res.sector_histogram[state.winding(1)];
    }
    res.bin_series.push_back(bin_sum / static_cast<double>(res.samples_per_bin));
  }
  res.n_samples = cfg.n_sweeps;
  res.plaquette = {state.plaquette_counter().proposed - plaquette_before.proposed,
                   state.plaquette_counter().accepted - plaquette_before.accepted};
  res.winding = {state.winding_counter().proposed - winding_before.proposed,
                 state.winding_counter().accepted - winding_before.accepted};
  res.worm = {state.worm_counter().proposed - worm_before.proposed,
              state.worm_counter().accepted - worm_before.accepted};
  finalize(res);
  return res;
}

McResult merge_results(const McResult& x, const McResult& y) {
  if (x.config.L != y.config.L || x.config.bc != y.config.bc)
    throw ValidationError("merge_results: chains on different lattices");
  if (x.samples_per_bin != y.samples_per_bin) throw ValidationError("merge_results: different bin sizes");
  McResult out = x;
  out.seeds.insert(out.seeds.end(), y.seeds.begin(), y.seeds.end());
  out.bin_series.insert(out.bin_series.end(), y.bin_series.begin(), y.bin_series.end());
  out.config.n_bins = static_cast<int>(out.bin_series.size());
  out.config.n_sweeps = x.config.n_sweeps + y.config.n_sweeps;
  out.raw_sum += y.raw_sum;
  out.raw_sum_sq += y.raw_sum_sq;
  out.n_samples += y.n_samples;
  out.plaquette.proposed += y.plaquette.proposed;
  out.plaquette.accepted += y.plaquette.accepted;
  out.winding.proposed += y.winding.proposed;
  out.winding.accepted += y.winding.accepted;
  out.worm.proposed += y.worm.proposed;
  out.worm.accepted += y.worm.accepted;
  for (const auto& [w, c] : y.sector_histogram) out.sector_histogram[w] += c;
  finalize(out);
  return out;
}

}  // namespace rvb
