#include "cvtel/sweep.hpp"

#include "cvtel/fidelity.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace cvtel {

namespace {

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SweepRow compute_row(const SweepSpec& spec, double r) {
  ChannelParams params;
  params.r = r;
  params.b0 = spec.b0;
  const TwoModeCovariance gamma = make_tmsv_noisy(params);

  SweepRow row;
  row.r = r;
  if (spec.target == SweepTarget::coherent) {
    const OneModeCovariance d = OneModeCovariance::coherent();
    const OptimizationResult full = optimize_one_sided(gamma, d, spec.side, CandidateFilter::all);
    const OptimizationResult sym =
        optimize_one_sided(gamma, d, spec.side, CandidateFilter::symplectic_only);
    row.fidelity_optimal_cp = full.best.fidelity;
    row.fidelity_symplectic_only = sym.best.fidelity;
    row.fidelity_no_op = teleport_fidelity(gamma, d).value;
    row.winner_kind = full.best.kind;
    row.x_opt = full.best.x;
    row.y_opt = full.best.y;
  } else {
    const OptimizationResult full = optimize_swap_one_sided(gamma, spec.side, CandidateFilter::all);
    const OptimizationResult sym =
        optimize_swap_one_sided(gamma, spec.side, CandidateFilter::symplectic_only);
    row.fidelity_optimal_cp = full.best.fidelity;
    row.fidelity_symplectic_only = sym.best.fidelity;
    row.fidelity_no_op = swap_fidelity(gamma).value;
    row.winner_kind = full.best.kind;
    row.x_opt = full.best.x;
    row.y_opt = full.best.y;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (!(spec.b0 >= 0.0)) throw ValidationError("sweep needs b0 >= 0");
  if (!(spec.r_min >= 0.0)) throw ValidationError("sweep needs r_min >= 0");
  if (spec.steps < 2) throw ValidationError("sweep needs at least 2 steps");
  if (!(spec.r_max > spec.r_min)) throw ValidationError("sweep needs r_max > r_min");
  if (spec.side == Side::both) {
    throw ValidationError("sweeps optimize a one-sided map; side must be bob or alice");
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.steps));
  const double dr = (spec.r_max - spec.r_min) / (spec.steps - 1);

  unsigned worker_count = std::thread::hardware_concurrency();
  if (worker_count == 0) worker_count = 1;
  worker_count = std::min<unsigned>(worker_count, 8);

  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w] {
      for (int i = static_cast<int>(w); i < spec.steps; i += static_cast<int>(worker_count)) {
        rows[static_cast<std::size_t>(i)] = compute_row(spec, spec.r_min + i * dr);
      }
    });
  }
  for (auto& t : workers) t.join();
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "r,fidelity_optimal_cp,fidelity_symplectic_only,fidelity_no_op,winner_kind,x_opt,y_opt\n";
  for (const SweepRow& row : rows) {
    out += sig12(row.r);
    out += ',';
    out += sig12(row.fidelity_optimal_cp);
    out += ',';
    out += sig12(row.fidelity_symplectic_only);
    out += ',';
    out += sig12(row.fidelity_no_op);
    out += ',';
    out += to_string(row.winner_kind);
    out += ',';
    out += sig12(row.x_opt);
    out += ',';
    out += sig12(row.y_opt);
    out += '\n';
  }
  return out;
}

std::string sweep_sidecar_json(const SweepSpec& spec) {
  nlohmann::json j;
  j["channel_family"] = "tmsv_noisy";
  j["b0"] = spec.b0;
  j["r_min"] = spec.r_min;
  j["r_max"] = spec.r_max;
  j["steps"] = spec.steps;
  j["target"] = to_string(spec.target);
  j["side"] = to_string(spec.side);
  const double threshold = cp_advantage_threshold(spec.b0);
  if (std::isfinite(threshold)) {
    j["do_nothing_threshold_r"] = threshold;
  } else {
    j["do_nothing_threshold_r"] = nullptr;
  }
  return j.dump(2) + "\n";
}

const char* to_string(SweepTarget target) {
  return target == SweepTarget::coherent ? "coherent" : "swap";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace cvtel
