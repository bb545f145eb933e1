#pragma once

#include "rvb/rational.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rvb {

/// Werner parameter p = -(4/3) <S_i.S_j>. The correlator must lie in
/// [-3/4, 0]; positive values have no Werner representation with p >= 0.
Rational werner_p(const Rational& corr);
double werner_p(double corr);

/// Inverse map, <S_i.S_j> = -(3/4) p.
Rational correlator_from_p(const Rational& p);

/// Entangled iff p > 1/3 (strict). p must lie in [0, 1].
bool entanglement_verdict(const Rational& p);
bool entanglement_verdict(double p);

/// C = max(0, (3p - 1)/2).
Rational concurrence(const Rational& p);
double concurrence(double p);

/// Entanglement of formation in ebits: h((1 + sqrt(1 - C^2))/2), h the
/// binary entropy in base 2; exactly 0 when C = 0.
double eof(double p);

double binary_entropy(double x);

enum class BoundStatus { Satisfied, Saturated, Violated };

std::string_view to_string(BoundStatus s);

struct AndersonBound {
  Rational corr_min;  // -1/4 - 1/(2z)
  Rational p_max;     // 1/3 + 2/(3z)
};

AndersonBound anderson_bound(int z);

/// Saturated when |corr - corr_min| <= 3 err, otherwise Satisfied above the
/// bound and Violated below it.
BoundStatus check_bound(double corr, double err, int z);
/// Exact comparison: Saturated only on equality.
BoundStatus check_bound(const Rational& corr, int z);

struct GasClosedForms {
  Rational corr_opposite;               // -1/4 - 1/(2N)
  std::optional<Rational> corr_same;    // +1/4, undefined for N = 1
  Rational p;                           // 1/3 + 2/(3N)
};

GasClosedForms gas_closed_forms(int N);

struct WernerSummary {
  double corr = 0.0;
  double corr_err = 0.0;
  double p = 0.0;
  double p_err = 0.0;
  double concurrence = 0.0;
  double eof = 0.0;
  bool entangled = false;
  std::optional<Rational> corr_exact;
  std::optional<Rational> p_exact;
  std::optional<Rational> concurrence_exact;
  std::optional<int> bound_z;
  std::optional<BoundStatus> bound_status;
  std::optional<bool> bound_satisfied;  // status != Violated
};

WernerSummary summarize(double corr, double corr_err, std::optional<int> z = std::nullopt);
WernerSummary summarize(const Rational& corr, std::optional<int> z = std::nullopt);

struct FitPoint {
  int L = 0;
  double p = 0.0;
  double p_err = 0.0;
};

struct FitOptions {
  bool scan_l_min = true;       // also try dropping the smallest L
  bool inflate_by_chi2 = true;  // scale the error by sqrt(chi2/dof) when > 1
};

struct FitResult {
  double p_infinity = 0.0;
  double p_infinity_err = 0.0;
  double a = 0.0;  // coefficient of 1/L
  double b = 0.0;  // coefficient of 1/L^2
  int l_min_used = 0;
  int n_points = 0;
  int dof = 0;
  double chi2 = 0.0;
  double chi2_per_dof = 0.0;  // 0 when dof == 0
};

/// Weighted least squares of p(L) = p_inf + a/L + b/L^2 with weights
/// 1/p_err^2. With scan_l_min the fit is repeated without the smallest L
/// (when at least 3 points remain) and the candidate whose chi2/dof is
/// closest to 1 is kept; exact fits (dof = 0) are chosen only when nothing
/// else exists. Throws ValidationError for fewer than 3 points, repeated L,
/// non-positive errors or a singular design.
FitResult extrapolate(std::span<const FitPoint> points, const FitOptions& options = {});

}  // namespace rvb
