#pragma once

#include "rvb/analysis.hpp"
#include "rvb/exact.hpp"
#include "rvb/lattice.hpp"
#include "rvb/mc.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rvb {

using json = nlohmann::ordered_json;

/// Digits after the point used for decimal renderings of exact values.
inline constexpr int kExactDecimalDigits = 16;

/// {schema_version, code_version, kind}; every top-level document starts with it.
json document_header(const std::string& kind);

json to_json(const WernerSummary& s);
json to_json(const FitResult& f);
json to_json(const McResult& r);
json to_json(const AndersonBound& b);
json to_json(const GasClosedForms& g, int N);

/// Record for one exact correlator: ensemble, size, boundary (lattice only),
/// pair or orbit, value_rational "num/den", value_decimal and p_decimal
/// (null when the correlator has no Werner parameter).
struct ExactRecord {
  Ensemble ensemble = Ensemble::NNLiquid;
  int size = 0;  // L for the liquid, N for the gas
  std::optional<Boundary> bc;
  int i = 0;
  int j = 0;
  std::optional<int> orbit_index;
  std::optional<int> orbit_size;
  Rational value;
};

json to_json(const ExactRecord& r);

McResult mc_result_from_json(const json& j);

/// Reads `L,p,p_err` rows; the header line is mandatory.
std::vector<FitPoint> read_fit_csv(std::istream& in);
std::vector<FitPoint> read_fit_csv_file(const std::string& path);
void write_fit_csv(std::ostream& out, const std::vector<FitPoint>& points);

/// `bin_index,corr_mean` rows.
void write_bins_csv(std::ostream& out, const McResult& r);

}  // namespace rvb
