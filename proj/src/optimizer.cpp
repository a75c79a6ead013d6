#include "cvtel/optimizer.hpp"

#include "cvtel/fidelity.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace cvtel {

namespace {

constexpr double kTieBand = 1e-10;
constexpr double kObjectiveDegenerateTol = 1e-12;

Mat2 diag2(double x, double y) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

std::string describe(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Real roots of a low-degree polynomial, coefficients ordered low to high.
// Deterministic: stable quadratic formula up to degree 2, companion-matrix
// eigenvalues plus Newton polish above.

double poly_eval(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double poly_eval_derivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
  return acc;
}

std::vector<double> real_roots(std::vector<double> coeffs) {
  double biggest = 0.0;
  for (double c : coeffs) biggest = std::max(biggest, std::abs(c));
  if (biggest == 0.0) return {};
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-13 * biggest) coeffs.pop_back();
  const std::size_t degree = coeffs.size() - 1;
  std::vector<double> roots;
  if (degree == 0) return roots;
  if (degree == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
    return roots;
  }
  if (degree == 2) {
    const double a = coeffs[2];
    const double b = coeffs[1];
    const double c = coeffs[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return roots;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      roots.push_back(q / a);
      roots.push_back(c / q);
    } else {
      roots.push_back(0.0);  // b = c = 0: double root at the origin
    }
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    const double lead = coeffs[degree];
    for (std::size_t i = 0; i + 1 < degree; ++i) companion(i + 1, i) = 1.0;
    for (std::size_t i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const std::complex<double> z = es.eigenvalues()(i);
      if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) continue;
      double x = z.real();
      for (int it = 0; it < 20; ++it) {
        const double p = poly_eval(coeffs, x);
        const double dp = poly_eval_derivative(coeffs, x);
        if (std::abs(dp) < 1e-14 * (1.0 + std::abs(p))) break;
        const double step = p / dp;
        x -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
      }
      roots.push_back(x);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double l, double r) { return std::abs(l - r) <= 1e-9 * (1.0 + std::abs(l)); }),
              roots.end());
  return roots;
}

// ---------------------------------------------------------------------------
// Deterministic Nelder-Mead minimization.

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                             const Eigen::VectorXd& start, double step, int eval_cap,
                             double spread_tol) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step;
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    vals[i] = fn(pts[i]);
    ++evals;
  }
  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto resort = [&] {
    std::sort(order.begin(), order.end(), [&](int l, int r) {
      if (vals[l] != vals[r]) return vals[l] < vals[r];
      return l < r;
    });
  };
  bool converged = false;
  while (evals < eval_cap) {
    resort();
    const int best = order[0];
    const int worst = order[n];
    if (vals[worst] - vals[best] <= spread_tol * (1.0 + std::abs(vals[best]))) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = fn(reflected);
    ++evals;
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = fn(expanded);
      ++evals;
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[order[n - 1]]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd contracted =
          outside ? (centroid + 0.5 * (reflected - centroid)).eval()
                  : (centroid + 0.5 * (pts[worst] - centroid)).eval();
      const double fc = fn(contracted);
      ++evals;
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          const int idx = order[i];
          pts[idx] = pts[order[0]] + 0.5 * (pts[idx] - pts[order[0]]);
          vals[idx] = fn(pts[idx]);
          ++evals;
        }
      }
    }
  }
  resort();
  return {pts[order[0]], vals[order[0]], converged};
}

// ---------------------------------------------------------------------------
// Core candidate machinery on the reduced (tridiagonal) problem.  All maps
// here are diagonal S = diag(x, y); alpha/beta are the diagonal entries of
// the matrix whose determinant is being minimized.

struct CoreProblem {
  double a = 1.0;
  double b = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double alpha0 = 1.0;  // alpha(0) = 2 d1 + a
  double beta0 = 1.0;   // beta(0) = 2 d2 + a
};

CoreProblem make_core_problem(const StandardFormParams& sf, const OneModeCovariance& d) {
  if (std::abs(d.m(0, 1)) > 1e-9 || std::abs(d.m(1, 0)) > 1e-9) {
    throw ValidationError("input covariance must be diagonal for the analytic candidate families");
  }
  CoreProblem p;
  p.a = sf.a;
  p.b = sf.b;
  p.c1 = sf.c1;
  p.c2 = sf.c2;
  p.d1 = d.m(0, 0);
  p.d2 = d.m(1, 1);
  p.alpha0 = 2.0 * p.d1 + p.a;
  p.beta0 = 2.0 * p.d2 + p.a;
  return p;
}

double core_alpha(const CoreProblem& p, double x) { return p.alpha0 + 2.0 * p.c1 * x + p.b * x * x; }
double core_beta(const CoreProblem& p, double y) { return p.beta0 - 2.0 * p.c2 * y + p.b * y * y; }

// Gradient residuals of f_s(x, y) = s (1 - xy) + sqrt(alpha beta) for both
// branch signs; the smaller residual names the branch the point belongs to.
void classify_branch(const CoreProblem& p, double x, double y, double alpha, double beta,
                     double* branch_sign, bool* stationary) {
  const double scale = 1.0 + std::abs(x) + std::abs(y);
  const double slope_x = (p.c1 + p.b * x) * std::sqrt(beta / alpha);
  const double slope_y = (p.b * y - p.c2) * std::sqrt(alpha / beta);
  double best_sign = 1.0;
  double best_res = std::numeric_limits<double>::infinity();
  for (const double s : {1.0, -1.0}) {
    const double res = std::max(std::abs(-s * y + slope_x), std::abs(-s * x + slope_y));
    if (res < best_res) {
      best_res = res;
      best_sign = s;
    }
  }
  *branch_sign = best_sign;
  *stationary = best_res <= 1e-6 * scale && best_sign == sign_of(1.0 - x * y);
}

bool make_diagonal_candidate(const CoreProblem& p, CandidateKind kind, double x, double y,
                             CandidateSolution* out, std::string* why_not) {
  const double alpha = core_alpha(p, x);
  const double beta = core_beta(p, y);
  if (alpha * beta <= 1e-14) {
    *why_not = "degenerate objective (alpha*beta ~ 0) at x=" + describe(x) + ", y=" + describe(y);
    return false;
  }
  const double s = x * y;
  const double root = std::sqrt(alpha * beta);
  const double f = std::abs(1.0 - s) + root;
  CandidateSolution cand;
  cand.kind = kind;
  cand.s_matrix = diag2(x, y);
  if (std::abs(1.0 - s) <= 1e-15) {
    cand.g_matrix = Mat2::Zero();
  } else {
    cand.g_matrix = (std::abs(1.0 - s) / root) * diag2(alpha, beta);
  }
  cand.x = x;
  cand.y = y;
  cand.objective = f * f;
  cand.fidelity = 2.0 / f;
  if (kind == CandidateKind::interior_root) {
    classify_branch(p, x, y, alpha, beta, &cand.branch_sign, &cand.stationary);
  }
  *out = cand;
  return true;
}

void sort_by_objective(std::vector<CandidateSolution>* list) {
  std::stable_sort(list->begin(), list->end(), [](const CandidateSolution& l, const CandidateSolution& r) {
    if (l.objective != r.objective) return l.objective < r.objective;
    return l.x < r.x;
  });
}

// Numeric minimization of f(x, y) over diagonal maps, used when the interior
// quadratic degenerates to the zero polynomial.
CandidateSolution scan_diagonal_minimum(const CoreProblem& p) {
  auto f = [&](double x, double y) {
    const double ab = core_alpha(p, x) * core_beta(p, y);
    return std::abs(1.0 - x * y) + std::sqrt(std::max(ab, 0.0));
  };
  double best_x = 0.0, best_y = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double x = -3.0 + 0.15 * i;
      const double y = -3.0 + 0.15 * j;
      const double v = f(x, y);
      if (v < best_val) {
        best_val = v;
        best_x = x;
        best_y = y;
      }
    }
  }
  Eigen::VectorXd start(2);
  start << best_x, best_y;
  const NelderMeadResult polished = nelder_mead(
      [&](const Eigen::VectorXd& v) { return f(v(0), v(1)); }, start, 0.1, 2000, 1e-13);
  CandidateSolution cand;
  std::string why;
  if (!make_diagonal_candidate(p, CandidateKind::interior_root, polished.x(0), polished.x(1), &cand,
                               &why)) {
    // Fall back to the raw grid point if the polished one degenerated.
    make_diagonal_candidate(p, CandidateKind::interior_root, best_x, best_y, &cand, &why);
  }
  cand.branch_sign = sign_of(1.0 - cand.x * cand.y);
  cand.stationary = true;
  return cand;
}

// ---------------------------------------------------------------------------
// Frame bookkeeping between the original channel and its reduced form.  For a
// candidate (S'', G'') acting in the reduced frame, the map performing the
// same transformation on the original channel is S = pre * S'' * post,
// G = conj * G''_side * conj^T, where G''_side is G'' itself on Bob and
// R G'' R on Alice.  The input covariance transported into the reduced frame
// is d_txf * D * d_txf^T.

struct FrameMaps {
  Mat2 s_pre = Mat2::Identity();
  Mat2 s_post = Mat2::Identity();
  Mat2 g_conj = Mat2::Identity();
  Mat2 d_txf = Mat2::Identity();
};

FrameMaps frame_for(const StandardFormParams& sf, Side side) {
  const Mat2& r = momentum_flip();
  FrameMaps f;
  if (side == Side::bob) {
    const Mat2 w = r * sf.alice_symplectic.inverse() * r;
    f.s_pre = w;
    f.s_post = sf.bob_symplectic;
    f.g_conj = w;
    f.d_txf = r * sf.alice_symplectic * r;
  } else {
    const Mat2 v = r * sf.bob_symplectic.inverse() * r;
    f.s_pre = v;
    f.s_post = sf.alice_symplectic;
    f.g_conj = v;
    f.d_txf = sf.bob_symplectic;
  }
  return f;
}

CandidateSolution to_original_frame(CandidateSolution cand, const FrameMaps& frames, Side side) {
  Mat2 g_frame = cand.g_matrix;
  if (side == Side::alice) {
    const Mat2& r = momentum_flip();
    g_frame = (r * g_frame * r).eval();
  }
  cand.s_matrix = (frames.s_pre * cand.s_matrix * frames.s_post).eval();
  cand.g_matrix = (frames.g_conj * g_frame * frames.g_conj.transpose()).eval();
  cand.side = side;
  return cand;
}

CandidateSolution pick_best(const std::vector<CandidateSolution>& ordered) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : ordered) top = std::max(top, c.fidelity);
  for (const auto& c : ordered) {
    if (c.fidelity >= top - kTieBand) return c;
  }
  return ordered.front();
}

Target classify_target(const Mat2* d) {
  if (!d) return Target::swap_fidelity;
  if ((*d - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12) return Target::coherent_fidelity;
  return Target::pure_gaussian_fidelity;
}

CandidateSolution identity_candidate(const TwoModeCovariance& gamma, const Mat2* d, Side side) {
  CandidateSolution ident;
  ident.kind = CandidateKind::identity;
  ident.side = side;
  ident.x = 1.0;
  ident.y = 1.0;
  if (d) {
    const FidelityValue fv = teleport_fidelity(gamma, OneModeCovariance{*d});
    ident.fidelity = fv.value;
    ident.objective = (2.0 * (*d) + fv.e_matrix).determinant();
  } else {
    const FidelityValue fv = swap_fidelity(gamma);
    ident.fidelity = fv.value;
    ident.objective = fv.e_matrix.determinant();
  }
  return ident;
}

OptimizationResult one_sided_core(const TwoModeCovariance& gamma, const Mat2* d, Side side,
                                  CandidateFilter filter) {
  const StandardFormParams sf = to_standard_form(gamma);
  const FrameMaps frames = frame_for(sf, side);

  Mat2 d_reduced = Mat2::Zero();
  if (d) d_reduced = (frames.d_txf * (*d) * frames.d_txf.transpose()).eval();

  if (std::abs(d_reduced(0, 1)) > 1e-9 || std::abs(d_reduced(1, 0)) > 1e-9) {
    const OneModeCovariance d_orig{*d};
    OptimizationResult res = optimize_numeric_fallback(gamma, &d_orig, side);
    res.notes.push_back(
        "input covariance is not diagonal in the reduced channel frame; derivative-free search "
        "used instead of the analytic families");
    return res;
  }

  StandardFormParams core = sf;
  if (side == Side::alice) std::swap(core.a, core.b);
  const OneModeCovariance d_core{diag2(d_reduced(0, 0), d_reduced(1, 1))};
  const CoreProblem problem = make_core_problem(core, d_core);

  OptimizationResult result;
  result.target = classify_target(d);
  result.side = side;
  result.input_d = d ? OneModeCovariance{*d} : OneModeCovariance{Mat2::Zero()};

  std::vector<CandidateSolution> all;
  all.push_back(identity_candidate(gamma, d, side));

  if (filter != CandidateFilter::no_op_only) {
    CandidateList boundary = boundary_candidates(core, d_core);
    for (auto& cand : boundary.candidates) all.push_back(to_original_frame(cand, frames, side));
    for (auto& note : boundary.diagnostics) result.notes.push_back(std::move(note));
  }
  if (filter == CandidateFilter::all) {
    CandidateList interior = interior_candidates(core, d_core);
    for (auto& cand : interior.candidates) all.push_back(to_original_frame(cand, frames, side));
    for (auto& note : interior.diagnostics) result.notes.push_back(std::move(note));

    CandidateSolution vac;
    std::string why;
    if (make_diagonal_candidate(problem, CandidateKind::vacuum_replacement, 0.0, 0.0, &vac, &why)) {
      all.push_back(to_original_frame(vac, frames, side));
    } else {
      result.notes.push_back("vacuum-replacement candidate skipped: " + why);
    }
  }

  result.all_candidates = std::move(all);
  result.best = pick_best(result.all_candidates);
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------

Mat2 optimal_g_for_s(const ObjectiveQuadratic& obj, double s_det) {
  const double disc = obj.alpha * obj.beta - obj.gamma_od * obj.gamma_od;
  if (disc <= kObjectiveDegenerateTol) {
    throw ComputationError("degenerate objective: alpha*beta - gamma^2 is not positive");
  }
  const double factor = std::abs(1.0 - s_det) / std::sqrt(disc);
  Mat2 g;
  g << obj.alpha, obj.gamma_od, obj.gamma_od, obj.beta;
  return factor * g;
}

double objective_determinant(const ObjectiveQuadratic& obj, double s_det) {
  double disc = obj.alpha * obj.beta - obj.gamma_od * obj.gamma_od;
  if (disc < -kObjectiveDegenerateTol) {
    throw ComputationError("negative objective discriminant");
  }
  disc = std::max(disc, 0.0);
  const double f = std::abs(1.0 - s_det) + std::sqrt(disc);
  return f * f;
}

CandidateList interior_candidates(const StandardFormParams& sf, const OneModeCovariance& d) {
  const CoreProblem p = make_core_problem(sf, d);
  CandidateList out;

  // Eliminating y via y = c2 (b x + c1) / ((b^2 - 1) x + b c1) and
  // substituting back turns the extremal equations into a quadratic in x.
  const double po = p.b * p.b - 1.0;
  const double k = p.beta0 * po - p.b * p.c2 * p.c2;
  const double a2 = po * k;
  const double a1 = 2.0 * p.b * p.c1 * k;
  const double a0 =
      p.b * p.b * p.c1 * p.c1 * p.beta0 - p.b * p.c1 * p.c1 * p.c2 * p.c2 - p.c2 * p.c2 * p.alpha0;

  const double magnitude = std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
  if (magnitude <= 1e-10 * std::max(1.0, p.beta0)) {
    out.candidates.push_back(scan_diagonal_minimum(p));
    out.diagnostics.push_back(
        "interior quadratic degenerated to the zero polynomial; numeric scan over diagonal maps "
        "used");
    return out;
  }

  const std::vector<double> roots = real_roots({a0, a1, a2});
  if (roots.empty()) {
    out.diagnostics.push_back("interior quadratic has no real roots");
    return out;
  }
  for (const double x : roots) {
    const double denom = po * x + p.b * p.c1;
    if (std::abs(denom) <= 1e-10 * (1.0 + std::abs(po * x) + std::abs(p.b * p.c1))) {
      out.diagnostics.push_back("elimination denominator vanished at interior root x=" +
                                describe(x) + "; root skipped");
      continue;
    }
    const double y = p.c2 * (p.b * x + p.c1) / denom;
    CandidateSolution cand;
    std::string why;
    if (!make_diagonal_candidate(p, CandidateKind::interior_root, x, y, &cand, &why)) {
      out.diagnostics.push_back("interior root skipped: " + why);
      continue;
    }
    out.candidates.push_back(cand);
  }
  sort_by_objective(&out.candidates);
  return out;
}

CandidateList boundary_candidates(const StandardFormParams& sf, const OneModeCovariance& d) {
  const CoreProblem p = make_core_problem(sf, d);
  CandidateList out;

  // d/dx of alpha(x) beta(1/x), cleared of denominators: a quartic with a
  // vanishing x^2 coefficient.
  const double q4 = p.b * p.beta0;
  const double q3 = p.c1 * p.beta0 - p.b * p.c2;
  const double q1 = p.c2 * p.alpha0 - p.b * p.c1;
  const double q0 = -p.alpha0 * p.b;

  const std::vector<double> roots = real_roots({q0, q1, 0.0, q3, q4});
  for (const double x : roots) {
    if (std::abs(x) < 1e-8) {
      out.diagnostics.push_back("boundary root at x ~ 0 skipped (y = 1/x diverges)");
      continue;
    }
    CandidateSolution cand;
    std::string why;
    if (!make_diagonal_candidate(p, CandidateKind::boundary_root, x, 1.0 / x, &cand, &why)) {
      out.diagnostics.push_back("boundary root skipped: " + why);
      continue;
    }
    cand.g_matrix = Mat2::Zero();  // symplectic: no noise needed
    out.candidates.push_back(cand);
  }
  sort_by_objective(&out.candidates);
  return out;
}

OptimizationResult optimize_one_sided(const TwoModeCovariance& gamma, const OneModeCovariance& d,
                                      Side side, CandidateFilter filter) {
  if (side == Side::both) {
    throw ValidationError(
        "one-sided optimization takes side bob or alice; use the two-sided entry points for both");
  }
  if (!is_pure(d)) {
    throw ValidationError("input covariance must be pure (det = 1) for teleportation fidelity");
  }
  return one_sided_core(gamma, &d.m, side, filter);
}

OptimizationResult optimize_swap_one_sided(const TwoModeCovariance& gamma, Side side,
                                           CandidateFilter filter) {
  if (side == Side::both) {
    throw ValidationError("use optimize_swap_two_sided for maps on both sides");
  }
  return one_sided_core(gamma, nullptr, side, filter);
}

OptimizationResult optimize_swap_two_sided(const TwoModeCovariance& gamma) {
  OptimizationResult bob = optimize_swap_one_sided(gamma, Side::bob);
  OptimizationResult alice = optimize_swap_one_sided(gamma, Side::alice);

  OptimizationResult result;
  result.target = Target::swap_fidelity;
  result.side = Side::both;
  result.input_d = OneModeCovariance{Mat2::Zero()};
  result.used_numeric_fallback = bob.used_numeric_fallback || alice.used_numeric_fallback;
  result.converged = bob.converged && alice.converged;

  // Replacing both modes with vacuum gives fidelity exactly 1: each side
  // contributes one unit of noise, det(2 I) = 4.
  CandidateSolution vacuum_both;
  vacuum_both.kind = CandidateKind::vacuum_replacement;
  vacuum_both.side = Side::both;
  vacuum_both.s_matrix = Mat2::Zero();
  vacuum_both.g_matrix = Mat2::Identity();
  vacuum_both.s_matrix_alice = Mat2::Zero();
  vacuum_both.g_matrix_alice = Mat2::Identity();
  vacuum_both.x = 0.0;
  vacuum_both.y = 0.0;
  vacuum_both.objective = 4.0;
  vacuum_both.fidelity = 1.0;

  CandidateSolution bob_strategy = bob.best;
  bob_strategy.kind = CandidateKind::bob_side;
  bob_strategy.side = Side::both;
  // The alice-only map moves to the alice slot of the two-sided candidate.
  CandidateSolution alice_strategy = alice.best;
  alice_strategy.kind = CandidateKind::alice_side;
  alice_strategy.side = Side::both;
  alice_strategy.s_matrix_alice = alice.best.s_matrix;
  alice_strategy.g_matrix_alice = alice.best.g_matrix;
  alice_strategy.s_matrix = Mat2::Identity();
  alice_strategy.g_matrix = Mat2::Zero();

  result.all_candidates = {vacuum_both, bob_strategy, alice_strategy};
  result.best = pick_best(result.all_candidates);
  result.notes.push_back(std::string("bob-side winner: ") + to_string(bob.best.kind) +
                         " (fidelity " + describe(bob.best.fidelity) + ")");
  result.notes.push_back(std::string("alice-side winner: ") + to_string(alice.best.kind) +
                         " (fidelity " + describe(alice.best.fidelity) + ")");
  for (auto& n : bob.notes) result.notes.push_back("bob side: " + n);
  for (auto& n : alice.notes) result.notes.push_back("alice side: " + n);
  return result;
}

OptimizationResult optimize_numeric_fallback(const TwoModeCovariance& gamma,
                                             const OneModeCovariance* d, Side side) {
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");
  if (d && !is_pure(*d)) {
    throw ValidationError("input covariance must be pure (det = 1) for teleportation fidelity");
  }

  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  const Mat2& r = momentum_flip();
  const Mat2 dmat = d ? d->m : Mat2::Zero();

  auto unpack = [](const Eigen::VectorXd& v, int off) {
    Mat2 s;
    s << v(off), v(off + 1), v(off + 2), v(off + 3);
    return s;
  };
  auto symmetrized = [](const Mat2& m) { return (0.5 * (m + m.transpose())).eval(); };

  auto m_bob = [&](const Mat2& s) {
    const Mat2 cs = (c * s.transpose()).eval();
    return symmetrized(2.0 * dmat + r * a * r + r * cs + cs.transpose() * r + s * b * s.transpose());
  };
  auto m_alice = [&](const Mat2& s) {
    const Mat2 sc = (s * c).eval();
    return symmetrized(2.0 * dmat + r * s * a * s.transpose() * r + r * sc + sc.transpose() * r + b);
  };
  auto m_both = [&](const Mat2& sa, const Mat2& sb) {
    const Mat2 cross = (sa * c * sb.transpose()).eval();
    return symmetrized(2.0 * dmat + r * sa * a * sa.transpose() * r + r * cross +
                       cross.transpose() * r + sb * b * sb.transpose());
  };

  const bool two_sided = side == Side::both;
  const int dim = two_sided ? 8 : 4;

  std::function<double(const Eigen::VectorXd&)> objective;
  if (side == Side::bob) {
    objective = [&](const Eigen::VectorXd& v) {
      const Mat2 s = unpack(v, 0);
      return std::abs(1.0 - s.determinant()) + std::sqrt(std::max(m_bob(s).determinant(), 0.0));
    };
  } else if (side == Side::alice) {
    objective = [&](const Eigen::VectorXd& v) {
      const Mat2 s = unpack(v, 0);
      return std::abs(1.0 - s.determinant()) + std::sqrt(std::max(m_alice(s).determinant(), 0.0));
    };
  } else {
    objective = [&](const Eigen::VectorXd& v) {
      const Mat2 sa = unpack(v, 0);
      const Mat2 sb = unpack(v, 4);
      return std::abs(1.0 - sa.determinant()) + std::abs(1.0 - sb.determinant()) +
             std::sqrt(std::max(m_both(sa, sb).determinant(), 0.0));
    };
  }

  auto pack = [&](const Mat2& first, const Mat2& second) {
    Eigen::VectorXd v(dim);
    v(0) = first(0, 0);
    v(1) = first(0, 1);
    v(2) = first(1, 0);
    v(3) = first(1, 1);
    if (two_sided) {
      v(4) = second(0, 0);
      v(5) = second(0, 1);
      v(6) = second(1, 0);
      v(7) = second(1, 1);
    }
    return v;
  };

  std::vector<Eigen::VectorXd> starts;
  if (!two_sided) {
    starts.push_back(pack(Mat2::Identity(), Mat2::Zero()));
    starts.push_back(pack(Mat2::Zero(), Mat2::Zero()));
    starts.push_back(pack(diag2(1.0, -1.0), Mat2::Zero()));
    starts.push_back(pack(diag2(-1.0, 1.0), Mat2::Zero()));
    starts.push_back(pack(-Mat2::Identity(), Mat2::Zero()));
    const double grid[] = {-1.5, -0.75, 0.0, 0.75, 1.5};
    for (double gx : grid) {
      for (double gy : grid) starts.push_back(pack(diag2(gx, gy), Mat2::Zero()));
    }
  } else {
    starts.push_back(pack(Mat2::Identity(), Mat2::Identity()));
    starts.push_back(pack(Mat2::Zero(), Mat2::Zero()));
    starts.push_back(pack(Mat2::Identity(), Mat2::Zero()));
    starts.push_back(pack(Mat2::Zero(), Mat2::Identity()));
    const double grid[] = {-1.0, 0.0, 1.0};
    for (double u : grid) {
      for (double v : grid) {
        for (double x : grid) {
          for (double y : grid) starts.push_back(pack(diag2(u, v), diag2(x, y)));
        }
      }
    }
  }
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = uni(rng);
    starts.push_back(v);
  }

  NelderMeadResult winner;
  for (const auto& start : starts) {
    const NelderMeadResult local = nelder_mead(objective, start, 0.25, 5000, 1e-12);
    if (local.value < winner.value) winner = local;
  }

  OptimizationResult result;
  result.target = classify_target(d ? &d->m : nullptr);
  result.side = side;
  result.input_d = d ? *d : OneModeCovariance{Mat2::Zero()};
  result.used_numeric_fallback = true;
  result.converged = winner.converged;

  if (winner.value < 1e-12) throw ComputationError("numeric search collapsed to zero objective");

  CandidateSolution found;
  found.side = side;
  found.objective = winner.value * winner.value;
  found.fidelity = 2.0 / winner.value;
  found.branch_sign = 0.0;

  auto near_matrix = [](const Mat2& m, const Mat2& target) {
    return (m - target).cwiseAbs().maxCoeff() < 1e-6;
  };
  auto noise_for = [&](const Mat2& m, double s_det) -> Mat2 {
    const double det = m.determinant();
    if (std::abs(1.0 - s_det) <= 1e-14) return Mat2::Zero();
    if (det <= kObjectiveDegenerateTol) return Mat2::Zero();
    return (std::abs(1.0 - s_det) / std::sqrt(det)) * m;
  };

  if (!two_sided) {
    const Mat2 s = unpack(winner.x, 0);
    const Mat2 m = side == Side::bob ? m_bob(s) : m_alice(s);
    Mat2 g = noise_for(m, s.determinant());
    if (side == Side::alice) g = (r * g * r).eval();
    found.s_matrix = s;
    found.g_matrix = g;
    found.x = s(0, 0);
    found.y = s(1, 1);
    if (near_matrix(s, Mat2::Identity()) && near_matrix(g, Mat2::Zero())) {
      found.kind = CandidateKind::identity;
    } else if (near_matrix(s, Mat2::Zero())) {
      found.kind = CandidateKind::vacuum_replacement;
    } else if (std::abs(s.determinant() - 1.0) < 1e-9) {
      found.kind = CandidateKind::boundary_root;
    } else {
      found.kind = CandidateKind::interior_root;
    }
  } else {
    const Mat2 sa = unpack(winner.x, 0);
    const Mat2 sb = unpack(winner.x, 4);
    const Mat2 m = m_both(sa, sb);
    const Mat2 gb = noise_for(m, sb.determinant());
    const Mat2 ga = (r * noise_for(m, sa.determinant()) * r).eval();
    found.s_matrix = sb;
    found.g_matrix = gb;
    found.s_matrix_alice = sa;
    found.g_matrix_alice = ga;
    found.x = sb(0, 0);
    found.y = sb(1, 1);
    const bool alice_trivial = near_matrix(sa, Mat2::Identity()) && near_matrix(ga, Mat2::Zero());
    const bool bob_trivial = near_matrix(sb, Mat2::Identity()) && near_matrix(gb, Mat2::Zero());
    if (alice_trivial && bob_trivial) {
      found.kind = CandidateKind::identity;
    } else if (near_matrix(sa, Mat2::Zero()) && near_matrix(sb, Mat2::Zero())) {
      found.kind = CandidateKind::vacuum_replacement;
    } else if (alice_trivial) {
      found.kind = CandidateKind::bob_side;
    } else if (bob_trivial) {
      found.kind = CandidateKind::alice_side;
    } else {
      found.kind = CandidateKind::bob_side;
      result.notes.push_back("numeric optimum applies maps on both sides");
    }
  }

  result.all_candidates.push_back(identity_candidate(gamma, d ? &d->m : nullptr, side));
  result.all_candidates.push_back(found);
  result.best = pick_best(result.all_candidates);
  result.notes.push_back("derivative-free search over " + describe(static_cast<double>(starts.size())) +
                         " starts");
  return result;
}

double cp_advantage_threshold(double b0) {
  if (!(b0 >= 0.0)) throw ValidationError("added noise b0 must be >= 0");
  if (b0 >= 1.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::log1p(-b0);
}

const char* to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::identity: return "identity";
    case CandidateKind::boundary_root: return "boundary_root";
    case CandidateKind::interior_root: return "interior_root";
    case CandidateKind::vacuum_replacement: return "vacuum_replacement";
    case CandidateKind::bob_side: return "bob_side";
    case CandidateKind::alice_side: return "alice_side";
  }
  return "unknown";
}

const char* to_string(Side side) {
  switch (side) {
    case Side::bob: return "bob";
    case Side::alice: return "alice";
    case Side::both: return "both";
  }
  return "unknown";
}

const char* to_string(Target target) {
  switch (target) {
    case Target::coherent_fidelity: return "coherent_fidelity";
    case Target::pure_gaussian_fidelity: return "pure_gaussian_fidelity";
    case Target::swap_fidelity: return "swap_fidelity";
  }
  return "unknown";
}

}  // namespace cvtel
