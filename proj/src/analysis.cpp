#include "rvb/analysis.hpp"

#include "rvb/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace rvb {

namespace {

void require_correlator_range(bool ok, const std::string& shown) {
  if (!ok) throw ValidationError("correlator " + shown + " outside [-3/4, 0] has no Werner parameter");
}

void require_p_range(bool ok, const std::string& shown) {
  if (!ok) throw ValidationError("Werner parameter " + shown + " outside [0, 1]");
}

}  // namespace

Rational werner_p(const Rational& corr) {
  require_correlator_range(corr >= Rational(-3, 4) && corr <= 0, to_fraction_string(corr));
  Rational p = Rational(-4, 3) * corr;
  p.canonicalize();
  return p;
}

double werner_p(double corr) {
  require_correlator_range(corr >= -0.75 && corr <= 0.0, std::to_string(corr));
  return -4.0 / 3.0 * corr;
}

Rational correlator_from_p(const Rational& p) {
  Rational c = Rational(-3, 4) * p;
  c.canonicalize();
  return c;
}

bool entanglement_verdict(const Rational& p) {
  require_p_range(p >= 0 && p <= 1, to_fraction_string(p));
  return p > Rational(1, 3);
}

bool entanglement_verdict(double p) {
  require_p_range(p >= 0.0 && p <= 1.0, std::to_string(p));
  return p > 1.0 / 3.0;
}

Rational concurrence(const Rational& p) {
  require_p_range(p >= 0 && p <= 1, to_fraction_string(p));
  Rational c = (3 * p - 1) / 2;
  c.canonicalize();
  return c > 0 ? c : Rational(0);
}

double concurrence(double p) {
  require_p_range(p >= 0.0 && p <= 1.0, std::to_string(p));
  return std::max(0.0, (3.0 * p - 1.0) / 2.0);
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double eof(double p) {
  const double c = concurrence(p);
  if (c == 0.0) return 0.0;
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

std::string_view to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Satisfied: return "satisfied";
    case BoundStatus::Saturated: return "saturated";
    case BoundStatus::Violated: return "violated";
  }
  return "unknown";
}

AndersonBound anderson_bound(int z) {
  if (z < 1) throw ValidationError("coordination z must be >= 1, got " + std::to_string(z));
  Rational corr_min = Rational(-1, 4) - Rational(1, 2 * z);
  Rational p_max = Rational(1, 3) + fraction(2, 3 * z);
  corr_min.canonicalize();
  p_max.canonicalize();
  return {corr_min, p_max};
}

BoundStatus check_bound(double corr, double err, int z) {
  if (err < 0.0) throw ValidationError("negative error bar");
  const double corr_min = anderson_bound(z).corr_min.get_d();
  if (std::abs(corr - corr_min) <= 3.0 * err) return BoundStatus::Saturated;
  return corr > corr_min ? BoundStatus::Satisfied : BoundStatus::Violated;
}

BoundStatus check_bound(const Rational& corr, int z) {
  const Rational corr_min = anderson_bound(z).corr_min;
  if (corr == corr_min) return BoundStatus::Saturated;
  return corr > corr_min ? BoundStatus::Satisfied : BoundStatus::Violated;
}

GasClosedForms gas_closed_forms(int N) {
  if (N < 1) throw ValidationError("gas size N must be >= 1, got " + std::to_string(N));
  GasClosedForms g;
  g.corr_opposite = Rational(-1, 4) - Rational(1, 2 * N);
  g.corr_opposite.canonicalize();
  if (N >= 2) g.corr_same = Rational(1, 4);
  g.p = Rational(1, 3) + fraction(2, 3 * N);
  g.p.canonicalize();
  return g;
}

WernerSummary summarize(double corr, double corr_err, std::optional<int> z) {
  WernerSummary s;
  s.corr = corr;
  s.corr_err = corr_err;
  s.p = werner_p(corr);
  s.p_err = 4.0 / 3.0 * corr_err;
  s.concurrence = concurrence(s.p);
  s.eof = eof(s.p);
  s.entangled = entanglement_verdict(s.p);
  if (z) {
    s.bound_z = z;
    s.bound_status = check_bound(corr, corr_err, *z);
    s.bound_satisfied = *s.bound_status != BoundStatus::Violated;
  }
  return s;
}

WernerSummary summarize(const Rational& corr, std::optional<int> z) {
  WernerSummary s = summarize(corr.get_d(), 0.0, std::nullopt);
  s.corr_exact = corr;
  s.p_exact = werner_p(corr);
  s.concurrence_exact = concurrence(*s.p_exact);
  s.entangled = entanglement_verdict(*s.p_exact);
  if (z) {
    s.bound_z = z;
    s.bound_status = check_bound(corr, *z);
    s.bound_satisfied = *s.bound_status != BoundStatus::Violated;
  }
  return s;
}

namespace {

FitResult fit_once(std::span<const FitPoint> pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) {
    const double inv_l = 1.0 / pts[k].L;
    const double w = 1.0 / pts[k].p_err;
    design(k, 0) = w;
    design(k, 1) = w * inv_l;
    design(k, 2) = w * inv_l * inv_l;
    rhs(k) = w * pts[k].p;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw ValidationError("extrapolate: singular design matrix");
  const Eigen::Vector3d coef = qr.solve(rhs);
  const Eigen::Matrix3d cov = (design.transpose() * design).inverse();

  FitResult r;
  r.p_infinity = coef(0);
  r.a = coef(1);
  r.b = coef(2);
  r.p_infinity_err = std::sqrt(cov(0, 0));
  r.l_min_used = pts.front().L;
  r.n_points = n;
  r.dof = n - 3;
  r.chi2 = (design * coef - rhs).squaredNorm();
  r.chi2_per_dof = r.dof > 0 ? r.chi2 / r.dof : 0.0;
  if (!std::isfinite(r.p_infinity) || !std::isfinite(r.p_infinity_err))
    throw ValidationError("extrapolate: non-finite fit result");
  return r;
}

}  // namespace

FitResult extrapolate(std::span<const FitPoint> points, const FitOptions& options) {
  if (points.size() < 3) throw ValidationError("extrapolate needs at least 3 points");
  std::vector<FitPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const FitPoint& x, const FitPoint& y) { return x.L < y.L; });
  std::set<int> seen;
  for (const auto& pt : pts) {
    if (pt.L <= 0) throw ValidationError("extrapolate: L must be positive");
    if (!seen.insert(pt.L).second) throw ValidationError("extrapolate: repeated L = " + std::to_string(pt.L));
    if (!(pt.p_err > 0.0) || !std::isfinite(pt.p_err) || !std::isfinite(pt.p))
      throw ValidationError("extrapolate: errors must be positive and finite (L = " + std::to_string(pt.L) + ")");
  }

  std::vector<FitResult> candidates{fit_once(pts)};
  if (options.scan_l_min && pts.size() >= 4) candidates.push_back(fit_once(std::span(pts).subspan(1)));

  const FitResult* best = nullptr;
  for (const auto& c : candidates) {
    if (c.dof < 1) continue;
    if (!best || std::abs(c.chi2_per_dof - 1.0) < std::abs(best->chi2_per_dof - 1.0)) best = &c;
  }
  if (!best) best = &candidates.front();

  FitResult out = *best;
  if (options.inflate_by_chi2 && out.chi2_per_dof > 1.0) out.p_infinity_err *= std::sqrt(out.chi2_per_dof);
  return out;
}

}  // namespace rvb
