// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: rvb_acceptance [--with-l128]

#include "commands.hpp"
#include "rvb/analysis.hpp"
#include "rvb/exact.hpp"
#include "rvb/io.hpp"
#include "rvb/mc.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace {

using namespace rvb;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* spec, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

struct Report {
  std::vector<std::pair<std::string, bool>> lines;
  void record(const std::string& id, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << id << ": " << detail << std::endl;
    lines.emplace_back(id, pass);
  }
  bool all_passed() const {
    for (const auto& [id, ok] : lines)
      if (!ok) return false;
    return true;
  }
};

void note(const std::string& text) { std::cout << "     " << text << std::endl; }

// Every correlator the run produces, checked against the coordination bound at the end.
struct BoundSweep {
  int checked = 0;
  int violated = 0;
  int saturated = 0;
  std::vector<std::string> offenders;
  void add(const Rational& corr, int z, const std::string& what) {
    tally(check_bound(corr, z), what);
  }
  void add(double corr, double err, int z, const std::string& what) { tally(check_bound(corr, err, z), what); }

 private:
  void tally(BoundStatus s, const std::string& what) {
    ++checked;
    if (s == BoundStatus::Saturated) ++saturated;
    if (s == BoundStatus::Violated) {
      ++violated;
      offenders.push_back(what);
    }
  }
};

struct CliOutcome {
  int code = 0;
  json doc;
  double seconds = 0;
};

CliOutcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rvb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = Clock::now();
  CliOutcome r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.seconds = seconds_since(t0);
  if (r.code == cli::kExitOk) r.doc = json::parse(out.str());
  else std::cerr << err.str();
  return r;
}

// ---------------------------------------------------------------------------

void exact_liquid_periodic(Report& rep) {
  const auto r = run_cli({"exact", "--L", "4", "--bc", "periodic"});
  bool ok = r.code == cli::kExitOk;
  std::string detail = "exact command failed";
  if (ok) {
    const auto& orbits = r.doc.at("orbits");
    const Rational p = parse_fraction(orbits.at(0).at("p_rational").get<std::string>());
    const std::string digits = to_decimal(p, 13);
    ok = orbits.size() == 1 && r.doc.at("covering_count") == 272 && p == Rational(3620, 8121) &&
         digits == "0.4457579115872" && r.seconds < 10.0;
    detail = fmt("p = %s = %s (target 0.4457579115872), %zu orbit(s), %.2f s (< 10 s)",
                 to_fraction_string(p).c_str(), digits.c_str(), orbits.size(), r.seconds);
  }
  rep.record("A1", ok, detail);
}

void exact_liquid_open(Report& rep) {
  const auto r = run_cli({"exact", "--L", "4", "--bc", "open"});
  if (r.code != cli::kExitOk) {
    rep.record("A2", false, "exact command failed");
    return;
  }
  std::vector<int> matches;
  for (const auto& orbit : r.doc.at("orbits")) {
    const Rational p = parse_fraction(orbit.at("p_rational").get<std::string>());
    const int index = orbit.at("orbit").at("index").get<int>();
    note(fmt("open 4x4 orbit %d (size %d): p = %s = %s", index, orbit.at("orbit").at("size").get<int>(),
             to_fraction_string(p).c_str(), to_decimal(p, 10).c_str()));
    if (to_decimal(p, 10) == "0.2281115037") matches.push_back(index);
  }
  const bool ok = matches.size() == 1;
  std::string detail = "no orbit reproduces 0.2281115037";
  if (ok)
    detail = fmt("orbit %d reproduces p = 0.2281115037 to 10 digits (%s)", matches.front(),
                 matches.front() == 0 ? "the centermost orbit" : "NOT the centermost orbit");
  rep.record("A2", ok, detail);
}

void exact_liquid_bound_inputs(BoundSweep& sweep) {
  for (auto [L, bc] : {std::pair{4, Boundary::Periodic}, {4, Boundary::Open}, {6, Boundary::Open}}) {
    const Lattice lat(L, bc);
    const auto values = exact_bond_correlators(lat, enumerate_nn_coverings(lat));
    for (std::size_t b = 0; b < values.size(); ++b) {
      const Bond& bond = lat.bond(static_cast<int>(b));
      sweep.add(values[b], equivalent_partner_count(lat, bond.first, bond.second),
                fmt("liquid %dx%d %s bond %zu", L, L, std::string(to_string(bc)).c_str(), b));
    }
  }
}

void gas_exactness(Report& rep, BoundSweep& sweep) {
  const auto t0 = Clock::now();
  bool ok = true;
  for (int N = 1; N <= 6; ++N) {
    const auto opp = exact_gas_correlator(N, false);
    const Rational expected = Rational(-1, 4) - fraction(1, 2 * N);
    const Rational p = werner_p(opp.value);
    const auto status = check_bound(opp.value, N);
    const bool row = opp.value == expected && p == Rational(1, 3) + fraction(2, 3 * N) &&
                     status == BoundStatus::Saturated;
    ok = ok && row;
    note(fmt("gas N=%d: corr %s, p %s, bound %s", N, to_fraction_string(opp.value).c_str(),
             to_fraction_string(p).c_str(), std::string(to_string(status)).c_str()));
    sweep.add(opp.value, N, fmt("gas N=%d opposite", N));
    if (N >= 2) {
      const auto same = exact_gas_correlator(N, true);
      ok = ok && same.value == Rational(1, 4);
      sweep.add(same.value, N - 1, fmt("gas N=%d same", N));
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  rep.record("A6", ok,
             fmt("N = 1..6: corr = -1/4 - 1/(2N), p = 1/3 + 2/(3N) exactly, bound saturated; %.2f s (< 60 s)", secs));
}

void oracle_equivalence(Report& rep, BoundSweep& sweep) {
  bool ok = true;
  int compared = 0;
  double worst = 0.0;
  auto compare = [&](const EnumerationResult& configs, const std::string& name, auto partner_count) {
    const int n = static_cast<int>(configs.sublattice.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) pairs.emplace_back(i, j);
    const auto loop = exact_correlators(configs, pairs);
    const auto sv = statevector_correlation_matrix(configs.coverings, configs.sublattice);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const double diff = std::abs(Rational(loop[k] - sv[i][j]).get_d());
      worst = std::max(worst, diff);
      ok = ok && diff <= 1e-12;
      ++compared;
      sweep.add(sv[i][j], partner_count(i, j), fmt("%s statevector (%d,%d)", name.c_str(), i, j));
    }
    return sv;
  };

  const Lattice plaquette(2, Boundary::Open);
  compare(enumerate_nn_coverings(plaquette), "liquid 2x2 open",
          [&](int i, int j) { return equivalent_partner_count(plaquette, i, j); });

  bool spin_ok = true;
  for (int N = 1; N <= 5; ++N) {
    const auto gas = enumerate_bipartite_pairings(N);
    const auto sv = compare(gas, fmt("gas N=%d", N),
                            [&](int i, int j) { return gas.sublattice[i] == gas.sublattice[j] ? N - 1 : N; });
    const auto sums = spin_sums(sv, gas.sublattice);
    const Rational s = fraction(N, 2);
    spin_ok = spin_ok && sums.total == 0 && sums.a_squared == s * (s + 1) && sums.b_squared == s * (s + 1);
  }
  rep.record("A8", ok && spin_ok,
             fmt("%d site pairs, max |loop - statevector| = %.1e (<= 1e-12); gas S_tot^2 = 0, S_A = S_B = N/2 for "
                 "N <= 5: %s",
                 compared, worst, spin_ok ? "yes" : "no"));
}

McResult mc_chain(int L, std::uint64_t seed, std::int64_t sweeps, bool frozen) {
  McConfig cfg;
  cfg.L = L;
  cfg.seed = seed;
  cfg.n_sweeps = sweeps;
  cfg.n_bins = 100;
  if (frozen) {
    cfg.winding_fraction = 0.0;
    cfg.worm_fraction = 0.0;
    cfg.allow_sector_freezing = true;
  }
  return run_chain(cfg);
}

void mc_small(Report& rep, BoundSweep& sweep) {
  const auto t0 = Clock::now();
  const auto r = mc_chain(4, 20240611, 1'000'000, false);
  const double secs = seconds_since(t0);
  const double exact_p = 3620.0 / 8121.0;
  const double dev = std::abs(r.p_mean - exact_p);
  sweep.add(r.corr_mean, r.corr_err, 4, "mc L=4");
  const bool ok = dev <= 3 * r.p_err && r.p_err <= 5e-4 && secs < 120.0;
  rep.record("A3", ok,
             fmt("L=4, 1e6 sweeps: p = %.6f +- %.6f vs exact %.6f (%.2f sigma, sigma <= 5e-4), %.1f s (< 120 s)",
                 r.p_mean, r.p_err, exact_p, dev / r.p_err, secs));
}

struct FamilyFit {
  bool ok = false;
  double p_inf = 0, err = 0, chi2_per_dof = 0;
  int l_min = 0;
};

constexpr double kReferenceP = 0.3946;
constexpr double kReferenceErr = 0.0003;

bool consistent_with_reference(double p, double err) {
  return std::abs(p - kReferenceP) <= 3 * std::sqrt(err * err + kReferenceErr * kReferenceErr);
}

FamilyFit fit_family(const std::string& name, const std::vector<FitPoint>& points, const std::filesystem::path& dir) {
  const auto csv = dir / (name + ".csv");
  {
    std::ofstream out(csv);
    write_fit_csv(out, points);
  }
  FamilyFit f;
  const auto r = run_cli({"fit", "--input", csv.string()});
  if (r.code != cli::kExitOk) return f;
  const auto& fit = r.doc.at("fit");
  f.p_inf = fit.at("p_infinity").get<double>();
  f.err = fit.at("p_infinity_err").get<double>();
  f.chi2_per_dof = fit.at("chi2_per_dof").get<double>();
  f.l_min = fit.at("l_min_used").get<int>();
  f.ok = f.p_inf >= 0.390 && f.p_inf <= 0.399 && consistent_with_reference(f.p_inf, f.err);
  note(fmt("%s fit: p_inf = %.5f +- %.5f (L_min %d, chi2/dof %.2f), in [0.390, 0.399] and consistent: %s",
           name.c_str(), f.p_inf, f.err, f.l_min, f.chi2_per_dof, f.ok ? "yes" : "no"));
  return f;
}

FamilyFit thermodynamic_limit(Report& rep, BoundSweep& sweep, bool with_l128) {
  const auto t0 = Clock::now();
  struct Size {
    int L;
    std::int64_t sweeps;
  };
  std::vector<Size> sizes{{8, 200'000}, {16, 100'000}, {32, 50'000}, {64, 20'000}};
  if (with_l128) sizes.push_back({128, 10'000});

  const auto dir = std::filesystem::temp_directory_path() / fmt("rvb_acceptance_%d", static_cast<int>(getpid()));
  std::filesystem::create_directories(dir);

  bool sigma_ok = true;
  std::map<std::string, std::vector<FitPoint>> families;
  for (const auto& [L, sweeps] : sizes) {
    for (bool frozen : {true, false}) {
      const std::string family = frozen ? "sector00" : "sampled";
      const auto r = mc_chain(L, 1000 + L + (frozen ? 0 : 1), sweeps, frozen);
      sigma_ok = sigma_ok && r.p_err <= 1e-3;
      sweep.add(r.corr_mean, r.corr_err, 4, fmt("mc %s L=%d", family.c_str(), L));
      families[family].push_back({L, r.p_mean, r.p_err});
      note(fmt("%s L=%3d: p = %.5f +- %.5f (tau_int %.1f, %lld sweeps, %zu sectors)", family.c_str(), L, r.p_mean,
               r.p_err, r.tau_int, static_cast<long long>(sweeps), r.sector_histogram.size()));
    }
  }

  auto fit_set = [&](const std::string& family, int max_L) {
    std::vector<FitPoint> pts;
    for (const auto& pt : families[family])
      if (pt.L <= max_L) pts.push_back(pt);
    return fit_family(fmt("%s_Lmax%d", family.c_str(), max_L), pts, dir);
  };
  const FamilyFit gate = fit_set("sector00", 64);
  const FamilyFit sampled = fit_set("sampled", 64);
  bool tighten_ok = true;
  if (with_l128) {
    const FamilyFit big = fit_set("sector00", 128);
    tighten_ok = big.ok && std::abs(big.p_inf - kReferenceP) <= std::abs(gate.p_inf - kReferenceP) + gate.err;
    note(fmt("with L=128: |p_inf - 0.3946| = %.5f vs %.5f without", std::abs(big.p_inf - kReferenceP),
             std::abs(gate.p_inf - kReferenceP)));
  }
  std::filesystem::remove_all(dir);

  const double secs = seconds_since(t0);
  const bool ok = sigma_ok && gate.ok && sampled.ok && tighten_ok && secs <= 3600.0;
  rep.record("A4", ok,
             fmt("p_inf = %.5f +- %.5f (sector (0,0) family), %.5f +- %.5f (sector-sampling family); "
                 "target [0.390, 0.399], reference 0.3946(3); sigma(p) <= 1e-3 at every L: %s; %.0f s",
                 gate.p_inf, gate.err, sampled.p_inf, sampled.err, sigma_ok ? "yes" : "no", secs));
  return gate;
}

void entanglement_verdict_check(Report& rep, const FamilyFit& fit) {
  const bool above = fit.p_inf - 3 * fit.err > 1.0 / 3.0 && entanglement_verdict(fit.p_inf);
  const double e = eof(kReferenceP);
  const double residual = e - 0.0215;
  note(fmt("eof(0.3946) = %.6f; reported 0.0215; residual %+.6f", e, residual));
  const bool ok = above && std::abs(e - 0.0218) <= 1e-4 && std::abs(residual) <= 5e-4;
  rep.record("A5", ok,
             fmt("p_inf = %.5f +- %.5f > 1/3 (by %.1f sigma); eof(0.3946) = %.4f (0.0218 +- 0.0001), "
                 "|eof - 0.0215| = %.4f (<= 0.0005)",
                 fit.p_inf, fit.err, (fit.p_inf - 1.0 / 3.0) / fit.err, e, std::abs(residual)));
}

// Exact probability of each loop count for the 4x4 torus ensemble.
std::map<int, double> exact_loop_distribution() {
  const auto cov = enumerate_nn_coverings(Lattice(4, Boundary::Periodic));
  std::map<int, double> weight;
  double total = 0;
  for (const auto& a : cov.coverings)
    for (const auto& b : cov.coverings) {
      const int n = count_loops(a.match(), b.match());
      const double w = std::ldexp(1.0, n);
      weight[n] += w;
      total += w;
    }
  for (auto& [n, w] : weight) w /= total;
  return weight;
}

void detailed_balance(Report& rep) {
  // chi-square over loop-count classes
  const auto expected_p = exact_loop_distribution();
  McConfig cfg;
  cfg.L = 4;
  cfg.seed = 777;
  McState st(cfg);
  for (std::int64_t k = 0; k < cfg.thermalization_sweeps(); ++k) st.sweep();
  const int n_samples = 100'000;
  std::map<int, double> observed;
  for (int s = 0; s < n_samples; ++s) {
    for (int k = 0; k < 10; ++k) st.sweep();
    observed[st.n_loops()] += 1;
  }
  // merge sparse classes (expected count < 5) into their neighbour
  std::vector<std::pair<double, double>> classes;  // (expected, observed)
  double exp_acc = 0, obs_acc = 0;
  for (const auto& [n, p] : expected_p) {
    exp_acc += p * n_samples;
    obs_acc += observed.count(n) ? observed.at(n) : 0.0;
    if (exp_acc >= 5) {
      classes.emplace_back(exp_acc, obs_acc);
      exp_acc = obs_acc = 0;
    }
  }
  if (exp_acc > 0) {
    classes.back().first += exp_acc;
    classes.back().second += obs_acc;
  }
  double chi2 = 0;
  for (const auto& [e, o] : classes) chi2 += (o - e) * (o - e) / e;
  const int dof = static_cast<int>(classes.size()) - 1;
  const double p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));

  // incremental loop bookkeeping against a full recount
  int mismatches = 0;
  std::int64_t moves = 0;
  for (int L : {4, 8}) {
    McConfig c;
    c.L = L;
    c.seed = 4242 + L;
    McState chain(c);
    for (int k = 0; k < 50'000; ++k, ++moves) {
      const int kind = k % 20;
      if (kind < 16) chain.plaquette_update();
      else if (kind < 19) chain.winding_update();
      else chain.worm_update();
      if (chain.n_loops() != count_loops(chain.replica(0), chain.replica(1))) ++mismatches;
    }
  }
  const bool ok = p_value > 0.01 && mismatches == 0;
  rep.record("A9", ok,
             fmt("4x4 loop-count chi2 = %.2f over %d dof, p-value %.3f (> 0.01); incremental vs recount: %d "
                 "mismatches in %lld moves",
                 chi2, dof, p_value, mismatches, static_cast<long long>(moves)));
}

void bound_sweep_check(Report& rep, const BoundSweep& sweep) {
  for (const auto& what : sweep.offenders) note("violated: " + what);
  rep.record("A7", sweep.violated == 0 && sweep.checked > 0,
             fmt("%d correlators checked against -1/4 - 1/(2z): %d violated, %d saturated", sweep.checked,
                 sweep.violated, sweep.saturated));
}

}  // namespace

int main(int argc, char** argv) {
  bool with_l128 = false;
  for (int k = 1; k < argc; ++k) {
    if (std::string(argv[k]) == "--with-l128") with_l128 = true;
    else {
      std::cerr << "usage: rvb_acceptance [--with-l128]\n";
      return 2;
    }
  }
  Report rep;
  BoundSweep sweep;
  try {
    exact_liquid_periodic(rep);
    exact_liquid_open(rep);
    exact_liquid_bound_inputs(sweep);
    mc_small(rep, sweep);
    const FamilyFit fit = thermodynamic_limit(rep, sweep, with_l128);
    entanglement_verdict_check(rep, fit);
    gas_exactness(rep, sweep);
    oracle_equivalence(rep, sweep);
    detailed_balance(rep);
    bound_sweep_check(rep, sweep);  // last: collects the correlators of every stage above
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return rep.all_passed() ? 0 : 1;
}
