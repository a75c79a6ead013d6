#pragma once

#include "cvtel/gaussian_core.hpp"

#include <string>
#include <vector>

namespace cvtel {

// Provenance of a candidate map.  bob_side / alice_side label the winning
// strategy inside a two-sided result; the other four label one-sided
// candidates directly.
enum class CandidateKind {
  identity,
  boundary_root,
  interior_root,
  vacuum_replacement,
  bob_side,
  alice_side,
};

enum class Side { bob, alice, both };

enum class Target { coherent_fidelity, pure_gaussian_fidelity, swap_fidelity };

// Which candidates an optimization run may use.
enum class CandidateFilter {
  all,              // every candidate family
  symplectic_only,  // identity and boundary roots (det S = 1, G = 0)
  no_op_only,       // identity alone
};

// Entries of the 2x2 matrix whose determinant is minimized for a fixed S:
// [[alpha, gamma_od], [gamma_od, beta]].  For diagonal S = diag(x, y) acting
// on Bob of a tridiagonal channel with diagonal input D,
//   alpha(x) = 2 d11 + a + 2 c1 x + b x^2,
//   beta(y)  = 2 d22 + a - 2 c2 y + b y^2,   gamma_od = 0.
struct ObjectiveQuadratic {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma_od = 0.0;
};

// Noise matrix minimizing det(M + G) subject to det G >= (1 - s_det)^2:
// G = |1 - s_det| / sqrt(alpha*beta - gamma^2) * [[alpha, gamma], [gamma, beta]].
// Throws ComputationError when alpha*beta - gamma^2 <= 1e-12 (degenerate).
Mat2 optimal_g_for_s(const ObjectiveQuadratic& obj, double s_det);

// The minimized determinant (|1 - s_det| + sqrt(alpha*beta - gamma^2))^2;
// the corresponding fidelity is 2 / sqrt of this.
double objective_determinant(const ObjectiveQuadratic& obj, double s_det);

struct CandidateSolution {
  CandidateKind kind = CandidateKind::identity;
  Side side = Side::bob;
  Mat2 s_matrix = Mat2::Identity();
  Mat2 g_matrix = Mat2::Zero();
  // Second map, meaningful only when side == both (alice part of a
  // two-sided strategy); identity/zero otherwise.
  Mat2 s_matrix_alice = Mat2::Identity();
  Mat2 g_matrix_alice = Mat2::Zero();
  double x = 1.0;            // diagonal entries of S in the frame where the
  double y = 1.0;            // analytic family is diagonal
  double objective = 0.0;    // minimized determinant value
  double fidelity = 0.0;     // 2 / sqrt(objective)
  double branch_sign = 0.0;  // interior roots: +-1, which |1 - xy| branch the
                             // root's extremal equations belong to
  bool stationary = true;    // interior roots: branch_sign == sign(1 - xy),
                             // i.e. the root is a true stationary point
};

struct CandidateList {
  std::vector<CandidateSolution> candidates;
  std::vector<std::string> diagnostics;
};

// Stationary points of f(x, y) = |1 - xy| + sqrt(alpha(x) beta(y)) over
// diagonal maps S = diag(x, y) on Bob of the reduced channel sf, with
// diagonal input d (d = 0 for the input-independent figure).  Eliminating y
// leaves a quadratic in x; both real roots are kept.  Roots whose extremal
// equations hold only on the branch opposite to sign(1 - xy) are still
// returned, flagged stationary = false, so callers see the full root set.
CandidateList interior_candidates(const StandardFormParams& sf, const OneModeCovariance& d);

// Minima of alpha(x) beta(1/x) on the symplectic boundary xy = 1 (G = 0):
// all real roots of the cleared derivative, a quartic in x, each yielding a
// candidate (x, 1/x); sorted by objective.
CandidateList boundary_candidates(const StandardFormParams& sf, const OneModeCovariance& d);

struct OptimizationResult {
  CandidateSolution best;
  std::vector<CandidateSolution> all_candidates;
  Target target = Target::coherent_fidelity;
  Side side = Side::bob;
  OneModeCovariance input_d;  // zero matrix for the swap target
  bool used_numeric_fallback = false;
  bool converged = true;
  std::vector<std::string> notes;
};

// Best local trace-preserving Gaussian map on one side maximizing the
// teleportation fidelity of the pure input d.  The channel is reduced to
// standard form first; when the transported d is diagonal in that frame the
// analytic candidate families are used, otherwise the numeric fallback runs.
// Candidate maps are reported in the original frame of gamma.  Ties within
// 1e-10 in fidelity prefer identity, then boundary, interior, vacuum.
OptimizationResult optimize_one_sided(const TwoModeCovariance& gamma, const OneModeCovariance& d,
                                      Side side, CandidateFilter filter = CandidateFilter::all);

// Same search for the input-independent swap figure (formally d = 0).
OptimizationResult optimize_swap_one_sided(const TwoModeCovariance& gamma, Side side,
                                           CandidateFilter filter = CandidateFilter::all);

// Two-sided swap optimum.  Exhausts the three strategies the problem reduces
// to: best bob-only map, best alice-only map, and vacuum replacement on both
// sides (fidelity exactly 1).  Ties within 1e-10 prefer vacuum replacement,
// then the bob-side strategy.
OptimizationResult optimize_swap_two_sided(const TwoModeCovariance& gamma);

// Derivative-free multi-start minimization over full (non-diagonal) S with
// the optimal G attached at every step; d == nullptr selects the swap
// figure; side == both searches maps on both modes.  Deterministic.
OptimizationResult optimize_numeric_fallback(const TwoModeCovariance& gamma,
                                             const OneModeCovariance* d, Side side);

// Squeezing threshold -ln(1 - b0)/2 below which a non-symplectic map beats
// every symplectic one on the noisy two-mode-squeezed family; +infinity for
// b0 >= 1.
double cp_advantage_threshold(double b0);

const char* to_string(CandidateKind kind);
const char* to_string(Side side);
const char* to_string(Target target);

}  // namespace cvtel
