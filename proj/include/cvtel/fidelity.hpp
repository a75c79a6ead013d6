#pragma once

#include "cvtel/gaussian_core.hpp"

namespace cvtel {

enum class FidelityKind {
  pure_state_fidelity,  // overlap with a pure input state, in [0, 1]
  swap_fidelity,        // normalization of the swapped-input slice, may exceed 1
};

struct FidelityValue {
  double value = 0.0;
  FidelityKind kind = FidelityKind::pure_state_fidelity;
  Mat2 e_matrix = Mat2::Zero();  // excess noise added by the channel
};

// Excess-noise matrix R A R^T + R C + C^T R^T + B of a two-mode resource;
// the teleported output covariance is the input one plus this.
Mat2 noise_matrix(const TwoModeCovariance& gamma);

// Fidelity of teleporting the pure one-mode state with covariance d through
// the resource gamma: 2 / sqrt(det(2 d + E)).  Throws if d is not pure.
FidelityValue teleport_fidelity(const TwoModeCovariance& gamma, const OneModeCovariance& d);

// Input-independent figure 2 / sqrt(det E); values above 1 certify that the
// resource outperforms every classical (measure-and-prepare) strategy.
FidelityValue swap_fidelity(const TwoModeCovariance& gamma);

OneModeCovariance output_covariance(const TwoModeCovariance& gamma, const OneModeCovariance& d_in);

}  // namespace cvtel
