#pragma once

#include <string>
#include <vector>

#include "cvtel/gaussian_core.hpp"
#include "cvtel/optimizer.hpp"

namespace cvtel {

enum class SweepTarget { coherent, swap };

// Squeezing sweep of the noisy two-mode-squeezed family at fixed b0.
struct SweepSpec {
  double b0 = 0.0;
  double r_min = 0.0;
  double r_max = 1.0;
  int steps = 101;
  SweepTarget target = SweepTarget::coherent;
  Side side = Side::bob;  // which mode the local map acts on
};

struct SweepRow {
  double r = 0.0;
  double fidelity_optimal_cp = 0.0;
  double fidelity_symplectic_only = 0.0;
  double fidelity_no_op = 0.0;
  CandidateKind winner_kind = CandidateKind::identity;
  double x_opt = 1.0;
  double y_opt = 1.0;
};

// Rows are computed in parallel and returned in increasing-r order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Byte-stable CSV: fixed header, 12 significant digits, LF line endings.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Run configuration as JSON, including the do-nothing threshold when finite.
std::string sweep_sidecar_json(const SweepSpec& spec);

const char* to_string(SweepTarget target);

// Writes content to path, throwing on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cvtel
