#include "rvb/io.hpp"

#include "rvb/errors.hpp"
#include "rvb/version.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rvb {

json document_header(const std::string& kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["kind"] = kind;
  return j;
}

json to_json(const WernerSummary& s) {
  json j;
  j["corr"] = s.corr;
  j["corr_err"] = s.corr_err;
  j["p"] = s.p;
  j["p_err"] = s.p_err;
  j["concurrence"] = s.concurrence;
  j["eof"] = s.eof;
  j["entangled"] = s.entangled;
  if (s.corr_exact) j["corr_rational"] = to_fraction_string(*s.corr_exact);
  if (s.p_exact) {
    j["p_rational"] = to_fraction_string(*s.p_exact);
    j["p_decimal"] = to_decimal(*s.p_exact, kExactDecimalDigits);
  }
  if (s.concurrence_exact) j["concurrence_rational"] = to_fraction_string(*s.concurrence_exact);
  if (s.bound_z) {
    j["bound_z"] = *s.bound_z;
    j["bound_status"] = to_string(*s.bound_status);
    j["bound_satisfied"] = *s.bound_satisfied;
  }
  return j;
}

json to_json(const FitResult& f) {
  json j;
  j["p_infinity"] = f.p_infinity;
  j["p_infinity_err"] = f.p_infinity_err;
  j["coefficients"] = {{"a", f.a}, {"b", f.b}};
  j["l_min_used"] = f.l_min_used;
  j["n_points"] = f.n_points;
  j["dof"] = f.dof;
  j["chi2"] = f.chi2;
  j["chi2_per_dof"] = f.chi2_per_dof;
  return j;
}

json to_json(const AndersonBound& b) {
  return {{"corr_min_rational", to_fraction_string(b.corr_min)},
          {"corr_min_decimal", to_decimal(b.corr_min, kExactDecimalDigits)},
          {"p_max_rational", to_fraction_string(b.p_max)},
          {"p_max_decimal", to_decimal(b.p_max, kExactDecimalDigits)}};
}

json to_json(const GasClosedForms& g, int N) {
  json j;
  j["N"] = N;
  j["corr_opposite_rational"] = to_fraction_string(g.corr_opposite);
  j["corr_opposite_decimal"] = to_decimal(g.corr_opposite, kExactDecimalDigits);
  j["corr_same_rational"] = g.corr_same ? json(to_fraction_string(*g.corr_same)) : json(nullptr);
  j["p_rational"] = to_fraction_string(g.p);
  j["p_decimal"] = to_decimal(g.p, kExactDecimalDigits);
  return j;
}

json to_json(const ExactRecord& r) {
  json j;
  j["ensemble"] = to_string(r.ensemble);
  j[r.ensemble == Ensemble::NNLiquid ? "L" : "N"] = r.size;
  j["bc"] = r.bc ? json(std::string(to_string(*r.bc))) : json(nullptr);
  j["pair"] = {r.i, r.j};
  if (r.orbit_index) j["orbit"] = {{"index", *r.orbit_index}, {"size", *r.orbit_size}};
  j["value_rational"] = to_fraction_string(r.value);
  j["value_decimal"] = to_decimal(r.value, kExactDecimalDigits);
  if (r.value >= Rational(-3, 4) && r.value <= 0)
    j["p_decimal"] = to_decimal(werner_p(r.value), kExactDecimalDigits);
  else
    j["p_decimal"] = nullptr;
  return j;
}

json to_json(const McResult& r) {
  json j = document_header("mc_result");
  j["rng_algorithm"] = r.rng_algorithm;
  json cfg;
  cfg["L"] = r.config.L;
  cfg["bc"] = std::string(to_string(r.config.bc));
  cfg["seed"] = r.config.seed;
  cfg["n_therm"] = r.config.thermalization_sweeps();
  cfg["n_sweeps"] = r.config.n_sweeps;
  cfg["n_bins"] = r.config.n_bins;
  cfg["winding_fraction"] = r.config.winding_fraction;
  cfg["worm_fraction"] = r.config.worm_fraction;
  cfg["allow_sector_freezing"] = r.config.allow_sector_freezing;
  j["config"] = cfg;
  j["seeds"] = r.seeds;
  j["corr_mean"] = r.corr_mean;
  j["corr_err"] = r.corr_err;
  j["p_mean"] = r.p_mean;
  j["p_err"] = r.p_err;
  j["tau_int"] = r.tau_int;
  j["first_half_mean"] = r.first_half_mean;
  j["second_half_mean"] = r.second_half_mean;
  j["samples_per_bin"] = r.samples_per_bin;
  j["n_samples"] = r.n_samples;
  j["raw_sum"] = r.raw_sum;
  j["raw_sum_sq"] = r.raw_sum_sq;
  auto counter = [](const UpdateCounter& c) {
    return json{{"proposed", c.proposed}, {"accepted", c.accepted}, {"rate", c.rate()}};
  };
  j["acceptance"] = {{"plaquette", counter(r.plaquette)}, {"winding", counter(r.winding)}, {"worm", counter(r.worm)}};
  json sectors = json::array();
  for (const auto& [w, c] : r.sector_histogram) sectors.push_back({{"wx", w.wx}, {"wy", w.wy}, {"count", c}});
  j["sector_histogram"] = sectors;
  j["bin_series"] = r.bin_series;
  return j;
}

McResult mc_result_from_json(const json& j) {
  try {
    McResult r;
    const auto& cfg = j.at("config");
    r.config.L = cfg.at("L").get<int>();
    r.config.bc = parse_boundary(cfg.at("bc").get<std::string>());
    r.config.seed = cfg.at("seed").get<std::uint64_t>();
    r.config.n_therm = cfg.at("n_therm").get<std::int64_t>();
    r.config.n_sweeps = cfg.at("n_sweeps").get<std::int64_t>();
    r.config.n_bins = cfg.at("n_bins").get<int>();
    r.config.winding_fraction = cfg.at("winding_fraction").get<double>();
    r.config.worm_fraction = cfg.at("worm_fraction").get<double>();
    r.config.allow_sector_freezing = cfg.at("allow_sector_freezing").get<bool>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    r.code_version = j.at("code_version").get<std::string>();
    r.corr_mean = j.at("corr_mean").get<double>();
    r.corr_err = j.at("corr_err").get<double>();
    r.p_mean = j.at("p_mean").get<double>();
    r.p_err = j.at("p_err").get<double>();
    r.tau_int = j.at("tau_int").get<double>();
    r.first_half_mean = j.at("first_half_mean").get<double>();
    r.second_half_mean = j.at("second_half_mean").get<double>();
    r.samples_per_bin = j.at("samples_per_bin").get<std::int64_t>();
    r.n_samples = j.at("n_samples").get<std::int64_t>();
    r.raw_sum = j.at("raw_sum").get<double>();
    r.raw_sum_sq = j.at("raw_sum_sq").get<double>();
    auto counter = [&](const char* name) {
      const auto& c = j.at("acceptance").at(name);
      return UpdateCounter{c.at("proposed").get<std::uint64_t>(), c.at("accepted").get<std::uint64_t>()};
    };
    r.plaquette = counter("plaquette");
    r.winding = counter("winding");
    r.worm = counter("worm");
    for (const auto& s : j.at("sector_histogram"))
      r.sector_histogram[{s.at("wx").get<int>(), s.at("wy").get<int>()}] = s.at("count").get<std::uint64_t>();
    r.bin_series = j.at("bin_series").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed McResult document: ") + e.what());
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

}  // namespace

std::vector<FitPoint> read_fit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("fit input: empty file");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"L", "p", "p_err"})
    throw ValidationError("fit input: header must be 'L,p,p_err', got '" + trim(line) + "'");
  std::vector<FitPoint> points;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ValidationError("fit input line " + std::to_string(lineno) + ": expected 3 columns");
    try {
      std::size_t used = 0;
      FitPoint pt;
      pt.L = std::stoi(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("L");
      pt.p = std::stod(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("p");
      pt.p_err = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("p_err");
      points.push_back(pt);
    } catch (const std::logic_error&) {
      throw ValidationError("fit input line " + std::to_string(lineno) + ": unparsable number");
    }
  }
  return points;
}

std::vector<FitPoint> read_fit_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fit input '" + path + "'");
  return read_fit_csv(in);
}

void write_fit_csv(std::ostream& out, const std::vector<FitPoint>& points) {
  out << "L,p,p_err\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& pt : points) out << pt.L << ',' << pt.p << ',' << pt.p_err << '\n';
}

void write_bins_csv(std::ostream& out, const McResult& r) {
  out << "bin_index,corr_mean\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < r.bin_series.size(); ++k) out << k << ',' << r.bin_series[k] << '\n';
}

}  // namespace rvb
