#pragma once

#include <cstdint>
#include <vector>

#include "cvtel/gaussian_core.hpp"
#include "cvtel/optimizer.hpp"

// Brute-force cross-checks for the closed-form fidelity and optimizer paths:
// direct phase-space quadrature of Wigner overlaps and exhaustive grid
// searches over map parameters.  Shares only the covariance types with the
// analytic code; every formula here is evaluated from the raw blocks.
namespace cvtel::oracle {

// Square quadrature window [-L, L]^2 discretized with N midpoints per axis.
struct PhaseSpaceGrid {
  double half_width = 10.0;
  int points_per_axis = 512;
};

struct QuadratureResult {
  double value = 0.0;
  // False when the window is small relative to the covariance scale and the
  // truncated tails may matter.
  bool grid_adequate = true;
};

// Window sized so Gaussian tails are negligible (8 standard deviations of the
// widest direction involved).  Pass d = nullptr for swap-overlap use.
PhaseSpaceGrid recommended_grid(const TwoModeCovariance& gamma, const OneModeCovariance* d,
                                int points_per_axis = 512);

// Teleportation fidelity as a discretized overlap of input and output Wigner
// functions; the output covariance is formed by adding the excess noise of
// the channel to the input.
QuadratureResult wigner_overlap_fidelity(const TwoModeCovariance& gamma, const OneModeCovariance& d,
                                         const PhaseSpaceGrid& grid);

// Entanglement-swapping fidelity as a 2-D quadrature of the two-mode Wigner
// function along the (x, p, -x, p) slice.
QuadratureResult swap_fidelity_integral(const TwoModeCovariance& gamma, const PhaseSpaceGrid& grid);

// Exhaustive scan over diagonal maps S = diag(x, y) on one side, with the
// optimal noise attached at each point.  d = nullptr targets the swap
// fidelity.  The winner is refined with a fine local scan (step/100 within a
// +-2*step box).  Ties resolve to the lexicographically smallest (x, y).
CandidateSolution grid_search_cp(const TwoModeCovariance& gamma, const OneModeCovariance* d,
                                 Side side, double bounds, double step);

struct TwoSidedGridOptimum {
  double u = 1.0;  // Alice scaling, first quadrature
  double v = 1.0;  // Alice scaling, second quadrature
  double x = 1.0;  // Bob scaling, first quadrature
  double y = 1.0;  // Bob scaling, second quadrature
  double fidelity = 0.0;
};

// Diagonal maps on both sides simultaneously.  d = nullptr targets the swap
// fidelity, otherwise teleportation of the given pure state.
TwoSidedGridOptimum grid_search_two_sided(const TwoModeCovariance& gamma,
                                          const OneModeCovariance* d, double bounds, double step);

// Deterministic sampler of separable two-mode covariances: random products of
// locally transformed thermal states, plus (after the first draw) additive
// classical noise with correlated blocks.  Every output passes the
// physicality and positive-partial-transpose checks.
std::vector<TwoModeCovariance> separable_state_sampler(std::uint64_t seed, int count);

}  // namespace cvtel::oracle
