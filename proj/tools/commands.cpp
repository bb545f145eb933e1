#include "commands.hpp"

#include "rvb/analysis.hpp"
#include "rvb/errors.hpp"
#include "rvb/exact.hpp"
#include "rvb/io.hpp"
#include "rvb/mc.hpp"
#include "rvb/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

namespace rvb::cli {

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw ValidationError("unknown output format '" + text + "' (expected json or csv)");
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << content;
  if (!f) throw ValidationError("failed writing '" + path + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::string bound_field(const WernerSummary& s) {
  return s.bound_status ? std::string(to_string(*s.bound_status)) : std::string();
}

}  // namespace

int cmd_exact(const ExactArgs& args, std::ostream& out, std::ostream& err) {
  const Lattice lat(args.L, parse_boundary(args.bc));
  const auto coverings = enumerate_nn_coverings(lat);
  const mpz_class transfer_count = count_nn_coverings_transfer(lat.size(), lat.boundary());
  if (transfer_count != static_cast<unsigned long>(coverings.count()))
    throw std::logic_error("covering enumeration disagrees with the transfer-matrix count");
  const auto values = exact_bond_correlators(lat, coverings, args.threads);
  const auto orbits = bond_orbits(lat);

  json doc = document_header("exact_liquid");
  doc["L"] = lat.size();
  doc["bc"] = std::string(to_string(lat.boundary()));
  doc["n_sites"] = lat.n_sites();
  doc["n_bonds"] = lat.n_bonds();
  doc["covering_count"] = coverings.count();
  json orbit_docs = json::array();

  std::ostringstream csv;
  csv << "orbit_index,orbit_size,i,j,z,value_rational,value_decimal,p_rational,p_decimal,concurrence,eof,entangled,"
         "bound_status\n";
  err << "L=" << lat.size() << " " << to_string(lat.boundary()) << ": " << coverings.count() << " coverings, "
      << orbits.size() << " bond orbit(s)\n";

  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const auto& orbit = orbits[k];
    const Bond& rep = lat.bond(orbit.front());
    const Rational& value = values[orbit.front()];
    for (int b : orbit)
      if (values[b] != value) throw std::logic_error("bond orbit members carry different correlators");
    const int z = equivalent_partner_count(lat, rep.first, rep.second);
    const WernerSummary summary = summarize(value, z);

    ExactRecord rec;
    rec.ensemble = Ensemble::NNLiquid;
    rec.size = lat.size();
    rec.bc = lat.boundary();
    rec.i = rep.first;
    rec.j = rep.second;
    rec.orbit_index = static_cast<int>(k);
    rec.orbit_size = static_cast<int>(orbit.size());
    rec.value = value;
    json o = to_json(rec);
    o["p_rational"] = to_fraction_string(*summary.p_exact);
    o["z"] = z;
    json bonds = json::array();
    for (int b : orbit) bonds.push_back({lat.bond(b).first, lat.bond(b).second});
    o["bonds"] = bonds;
    o["summary"] = to_json(summary);
    orbit_docs.push_back(o);

    csv << k << ',' << orbit.size() << ',' << rep.first << ',' << rep.second << ',' << z << ','
        << to_fraction_string(value) << ',' << to_decimal(value, kExactDecimalDigits) << ','
        << to_fraction_string(*summary.p_exact) << ',' << to_decimal(*summary.p_exact, kExactDecimalDigits) << ','
        << std::setprecision(12) << summary.concurrence << ',' << summary.eof << ','
        << (summary.entangled ? "true" : "false") << ',' << bound_field(summary) << '\n';
    err << "  orbit " << k << " (" << orbit.size() << " bonds): p = " << to_fraction_string(*summary.p_exact) << " = "
        << to_decimal(*summary.p_exact, 13) << "\n";
  }
  doc["orbits"] = orbit_docs;

  const std::string text = args.format == OutputFormat::Json ? doc.dump(2) + "\n" : csv.str();
  out << text;
  if (args.output) write_file(*args.output, text);
  return kExitOk;
}

int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& err) {
  if (!args.seed) throw ValidationError("mc: --seed is required");
  if (args.chains < 1) throw ValidationError("mc: --chains must be >= 1");
  McConfig cfg;
  cfg.L = args.L;
  cfg.bc = parse_boundary(args.bc);
  if (cfg.bc != Boundary::Periodic) throw ValidationError("mc: production runs use periodic boundaries");
  cfg.seed = *args.seed;
  cfg.n_therm = args.therm;
  cfg.n_sweeps = args.sweeps;
  cfg.n_bins = args.bins;
  cfg.winding_fraction = args.winding_fraction;
  cfg.worm_fraction = args.worm_fraction;
  cfg.allow_sector_freezing = args.allow_sector_freezing;
  cfg.validate();

  // A single chain runs on the master seed; chain c of several runs on derive_seed(seed, c + 1).
  std::vector<McConfig> configs(args.chains, cfg);
  if (args.chains > 1)
    for (int c = 0; c < args.chains; ++c) configs[c].seed = derive_seed(*args.seed, static_cast<std::uint64_t>(c) + 1);
  std::vector<McResult> results(args.chains);
  {
    std::vector<std::jthread> pool;
    for (int c = 0; c < args.chains; ++c) pool.emplace_back([&, c] { results[c] = run_chain(configs[c]); });
  }
  McResult merged = results.front();
  for (int c = 1; c < args.chains; ++c) merged = merge_results(merged, results[c]);
  merged.config.seed = *args.seed;

  const WernerSummary summary = summarize(merged.corr_mean, merged.corr_err, 4);
  json doc = to_json(merged);
  doc["summary"] = to_json(summary);
  if (args.timestamp) doc["run_info"] = {{"timestamp", utc_timestamp()}};

  err << std::setprecision(6) << "L=" << cfg.L << ": p = " << merged.p_mean << " +- " << merged.p_err
      << " (tau_int " << merged.tau_int << " sweeps)\n"
      << "  acceptance: plaquette " << merged.plaquette.rate() << ", line shift " << merged.winding.rate()
      << ", worm " << merged.worm.rate() << "\n"
      << "  eof " << summary.eof << ", entangled " << (summary.entangled ? "yes" : "no") << ", bound (z=4) "
      << bound_field(summary) << "\n  sectors:";
  for (const auto& [w, c] : merged.sector_histogram) err << " (" << w.wx << "," << w.wy << "):" << c;
  err << "\n";

  std::ostringstream bins;
  write_bins_csv(bins, merged);
  const std::string json_text = doc.dump(2) + "\n";
  out << (args.format == OutputFormat::Json ? json_text : bins.str());
  if (args.output) write_file(*args.output, json_text);
  if (args.bins_csv) write_file(*args.bins_csv, bins.str());
  return kExitOk;
}

int cmd_gas(const GasArgs& args, std::ostream& out, std::ostream& err) {
  const GasClosedForms g = gas_closed_forms(args.N);
  const WernerSummary summary = summarize(g.corr_opposite, args.N);
  json doc = document_header("gas");
  doc.update(to_json(g, args.N));
  doc["entangled"] = summary.entangled;
  doc["summary"] = to_json(summary);
  doc["anderson_bound"] = to_json(anderson_bound(args.N));

  std::optional<ExactCorrelator> enumerated;
  if (args.enumerate && args.N <= kMaxGasN) {
    enumerated = exact_gas_correlator(args.N, false);
    doc["enumerated_corr_opposite_rational"] = to_fraction_string(enumerated->value);
    doc["enumeration_agrees"] = enumerated->value == g.corr_opposite;
    if (args.N >= 2) {
      const auto same = exact_gas_correlator(args.N, true);
      doc["enumerated_corr_same_rational"] = to_fraction_string(same.value);
    }
  } else {
    doc["enumerated_corr_opposite_rational"] = nullptr;
    doc["enumeration_agrees"] = nullptr;
  }
  err << "N=" << args.N << ": corr = " << to_fraction_string(g.corr_opposite) << ", p = " << to_fraction_string(g.p)
      << ", entangled " << (summary.entangled ? "yes" : "no") << ", bound (z=N) " << bound_field(summary) << "\n";
  if (enumerated && enumerated->value != g.corr_opposite) {
    err << "enumeration disagrees with closed form: " << to_fraction_string(enumerated->value) << "\n";
  }

  if (args.format == OutputFormat::Json) {
    out << doc.dump(2) << "\n";
  } else {
    out << "N,corr_opposite_rational,corr_same_rational,p_rational,p_decimal,entangled,bound_status\n"
        << args.N << ',' << to_fraction_string(g.corr_opposite) << ','
        << (g.corr_same ? to_fraction_string(*g.corr_same) : std::string()) << ',' << to_fraction_string(g.p) << ','
        << to_decimal(g.p, kExactDecimalDigits) << ',' << (summary.entangled ? "true" : "false") << ','
        << bound_field(summary) << '\n';
  }
  return kExitOk;
}

int cmd_bound(const BoundArgs& args, std::ostream& out, std::ostream& err) {
  const AndersonBound b = anderson_bound(args.z);
  const BoundStatus status = check_bound(args.corr, args.err, args.z);
  json doc = document_header("bound");
  doc["corr"] = args.corr;
  doc["err"] = args.err;
  doc["z"] = args.z;
  doc["status"] = to_string(status);
  doc["bound"] = to_json(b);
  if (args.corr >= -0.75 && args.corr <= 0.0) doc["summary"] = to_json(summarize(args.corr, args.err, args.z));
  err << "corr " << args.corr << " +- " << args.err << " vs bound " << to_decimal(b.corr_min, 6) << " (z=" << args.z
      << "): " << to_string(status) << "\n";
  if (args.format == OutputFormat::Json) {
    out << doc.dump(2) << "\n";
  } else {
    out << "corr,err,z,corr_min_rational,p_max_rational,status\n"
        << std::setprecision(17) << args.corr << ',' << args.err << ',' << args.z << ','
        << to_fraction_string(b.corr_min) << ',' << to_fraction_string(b.p_max) << ',' << to_string(status) << '\n';
  }
  return kExitOk;
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  const auto points = read_fit_csv_file(args.input);
  FitOptions options;
  options.scan_l_min = args.scan_l_min;
  const FitResult fit = extrapolate(points, options);
  json doc = document_header("fit");
  doc["input"] = args.input;
  doc["fit"] = to_json(fit);
  if (fit.p_infinity >= 0.0 && fit.p_infinity <= 1.0) {
    doc["p_infinity_entangled"] = entanglement_verdict(fit.p_infinity);
    doc["p_infinity_concurrence"] = concurrence(fit.p_infinity);
    doc["p_infinity_eof"] = eof(fit.p_infinity);
  }
  err << std::setprecision(6) << "p_inf = " << fit.p_infinity << " +- " << fit.p_infinity_err << " (L_min "
      << fit.l_min_used << ", chi2/dof " << fit.chi2_per_dof << ")\n";
  std::string text;
  if (args.format == OutputFormat::Json) {
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << std::setprecision(17) << "p_infinity,p_infinity_err,a,b,l_min_used,n_points,dof,chi2_per_dof\n"
        << fit.p_infinity << ',' << fit.p_infinity_err << ',' << fit.a << ',' << fit.b << ',' << fit.l_min_used << ','
        << fit.n_points << ',' << fit.dof << ',' << fit.chi2_per_dof << '\n';
    text = csv.str();
  }
  out << text;
  if (args.output) write_file(*args.output, text);
  return kExitOk;
}

namespace {

template <class F>
int run_guarded(F&& f, std::ostream& err) {
  try {
    return f();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ResourceGuardError& e) {
    err << "refused: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement of resonating-valence-bond states: exact sums, Monte Carlo, Werner analysis"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "Output format: json or csv")->capture_default_str();

  ExactArgs exact;
  auto* exact_cmd = app.add_subcommand("exact", "Exact nearest-neighbour liquid correlators by enumeration");
  exact_cmd->add_option("--L", exact.L, "Linear size (even)")->required();
  exact_cmd->add_option("--bc", exact.bc, "Boundary: periodic or open")->capture_default_str();
  exact_cmd->add_option("--output", exact.output, "Also write the report to this file");
  exact_cmd->add_option("--threads", exact.threads, "Worker threads (0 = all cores)");
  exact_cmd->add_option("--format", format, "Output format: json or csv");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo for the nearest-neighbour liquid on the torus");
  mc_cmd->add_option("--L", mc.L, "Linear size (even, >= 4)")->required();
  mc_cmd->add_option("--bc", mc.bc, "Boundary (periodic only)")->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "Master seed (required)");
  mc_cmd->add_option("--sweeps", mc.sweeps, "Measurement sweeps")->capture_default_str();
  mc_cmd->add_option("--bins", mc.bins, "Number of bins (>= 32, divides sweeps)")->capture_default_str();
  mc_cmd->add_option("--therm", mc.therm, "Thermalization sweeps (default max(10000, 100 L))");
  mc_cmd->add_option("--winding-fraction", mc.winding_fraction, "Share of line-shift proposals")->capture_default_str();
  mc_cmd->add_option("--worm-fraction", mc.worm_fraction, "Share of worm proposals")->capture_default_str();
  mc_cmd->add_flag("--allow-sector-freezing", mc.allow_sector_freezing, "Permit runs without sector-changing moves");
  mc_cmd->add_option("--chains", mc.chains, "Independent chains to run and merge")->capture_default_str();
  mc_cmd->add_option("--output", mc.output, "Write the McResult JSON here");
  mc_cmd->add_option("--bins-csv", mc.bins_csv, "Write the bin series CSV here");
  mc_cmd->add_flag("!--no-timestamp", mc.timestamp, "Omit run_info.timestamp");
  mc_cmd->add_option("--format", format, "Output format: json or csv");

  GasArgs gas;
  auto* gas_cmd = app.add_subcommand("gas", "Closed forms for the bipartite gas, checked by enumeration");
  gas_cmd->add_option("--N", gas.N, "Half the number of spins")->required();
  gas_cmd->add_flag("!--no-enumerate", gas.enumerate, "Skip the enumeration cross-check");
  gas_cmd->add_option("--format", format, "Output format: json or csv");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "Check a correlator against the Anderson bound");
  bound_cmd->add_option("--corr", bound.corr, "Correlator <S_i.S_j>")->required();
  bound_cmd->add_option("--err", bound.err, "1 sigma error")->capture_default_str();
  bound_cmd->add_option("--z", bound.z, "Number of equivalent partners")->capture_default_str();
  bound_cmd->add_option("--format", format, "Output format: json or csv");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Extrapolate p(L) to the thermodynamic limit");
  fit_cmd->add_option("--input", fit.input, "CSV with columns L,p,p_err")->required();
  fit_cmd->add_flag("!--no-scan", fit.scan_l_min, "Do not try dropping the smallest L");
  fit_cmd->add_option("--output", fit.output, "Also write the report to this file");
  fit_cmd->add_option("--format", format, "Output format: json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  return run_guarded(
      [&] {
        const OutputFormat fmt = parse_format(format);
        if (exact_cmd->parsed()) {
          exact.format = fmt;
          return cmd_exact(exact, out, err);
        }
        if (mc_cmd->parsed()) {
          mc.format = fmt;
          return cmd_mc(mc, out, err);
        }
        if (gas_cmd->parsed()) {
          gas.format = fmt;
          return cmd_gas(gas, out, err);
        }
        if (bound_cmd->parsed()) {
          bound.format = fmt;
          return cmd_bound(bound, out, err);
        }
        fit.format = fmt;
        return cmd_fit(fit, out, err);
      },
      err);
}

}  // namespace rvb::cli
