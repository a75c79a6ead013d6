#include <CLI11.hpp>
#include <json.hpp>

#include "cvtel/channel_json.hpp"
#include "cvtel/fidelity.hpp"
#include "cvtel/gaussian_core.hpp"
#include "cvtel/optimizer.hpp"
#include "cvtel/oracle.hpp"
#include "cvtel/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cvtel;

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string mat2_text(const Mat2& m) {
  return "[[" + sig12(m(0, 0)) + ", " + sig12(m(0, 1)) + "], [" + sig12(m(1, 0)) + ", " +
         sig12(m(1, 1)) + "]]";
}

// Arguments may be given inline or as @path-to-file.
std::string arg_or_file(const std::string& value) {
  if (value.empty() || value[0] != '@') return value;
  const std::string path = value.substr(1);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

Side parse_side(const std::string& text) {
  if (text == "bob") return Side::bob;
  if (text == "alice") return Side::alice;
  return Side::both;
}

nlohmann::json mat2_json(const Mat2& m) {
  return nlohmann::json::array({nlohmann::json::array({m(0, 0), m(0, 1)}),
                                nlohmann::json::array({m(1, 0), m(1, 1)})});
}

nlohmann::json candidate_json(const CandidateSolution& cand) {
  nlohmann::json j;
  j["kind"] = to_string(cand.kind);
  j["side"] = to_string(cand.side);
  j["fidelity"] = cand.fidelity;
  j["objective"] = cand.objective;
  j["x"] = cand.x;
  j["y"] = cand.y;
  j["s"] = mat2_json(cand.s_matrix);
  j["g"] = mat2_json(cand.g_matrix);
  if (cand.side == Side::both) {
    j["s_alice"] = mat2_json(cand.s_matrix_alice);
    j["g_alice"] = mat2_json(cand.g_matrix_alice);
  }
  if (cand.kind == CandidateKind::interior_root) {
    j["branch_sign"] = cand.branch_sign;
    j["stationary"] = cand.stationary;
  }
  return j;
}

int run_fidelity(const std::string& channel_text, const std::string& input_text, bool swap_flag,
                 bool verify) {
  const ChannelSpec spec = channel_from_json(arg_or_file(channel_text));
  int rc = 0;
  FidelityValue teleport{};
  FidelityValue swapped{};
  const bool want_teleport = !input_text.empty() || !swap_flag;
  if (want_teleport) {
    const OneModeCovariance d =
        parse_input_covariance(arg_or_file(input_text.empty() ? "coherent" : input_text));
    teleport = teleport_fidelity(spec.gamma, d);
    std::cout << "fidelity = " << sig12(teleport.value) << "\n";
  }
  if (swap_flag) {
    swapped = swap_fidelity(spec.gamma);
    std::cout << "swap_fidelity = " << sig12(swapped.value) << "\n";
  }
  const Mat2 e = noise_matrix(spec.gamma);
  std::cout << "excess_noise = " << mat2_text(e) << "\n";

  if (verify) {
    if (want_teleport) {
      const OneModeCovariance d =
          parse_input_covariance(arg_or_file(input_text.empty() ? "coherent" : input_text));
      const oracle::PhaseSpaceGrid grid = oracle::recommended_grid(spec.gamma, &d, 256);
      const oracle::QuadratureResult q = oracle::wigner_overlap_fidelity(spec.gamma, d, grid);
      const double delta = std::abs(q.value - teleport.value);
      std::cout << "oracle_fidelity = " << sig12(q.value) << " (delta " << sig12(delta) << ")\n";
      if (!(delta <= 1e-5)) {
        std::cerr << "error: verify mismatch: fidelity differs from quadrature by " << sig12(delta)
                  << std::endl;
        rc = 3;
      }
    }
    if (swap_flag && rc == 0) {
      const oracle::PhaseSpaceGrid grid = oracle::recommended_grid(spec.gamma, nullptr, 256);
      const oracle::QuadratureResult q = oracle::swap_fidelity_integral(spec.gamma, grid);
      const double delta = std::abs(q.value - swapped.value);
      std::cout << "oracle_swap_fidelity = " << sig12(q.value) << " (delta " << sig12(delta)
                << ")\n";
      if (!(delta <= 1e-5)) {
        std::cerr << "error: verify mismatch: swap fidelity differs from quadrature by "
                  << sig12(delta) << std::endl;
        rc = 3;
      }
    }
  }
  return rc;
}

int run_optimize(const std::string& channel_text, const std::string& target_text,
                 const std::string& side_text, const std::string& input_text, bool verify,
                 const std::string& out_path) {
  const ChannelSpec spec = channel_from_json(arg_or_file(channel_text));
  const Side side = parse_side(side_text);
  const bool teleport_target = target_text == "coherent";

  OneModeCovariance d;
  OptimizationResult res;
  if (teleport_target) {
    d = parse_input_covariance(arg_or_file(input_text.empty() ? "coherent" : input_text));
    if (side == Side::both) {
      // No closed-form reduction covers maps on both sides for this target.
      res = optimize_numeric_fallback(spec.gamma, &d, Side::both);
    } else {
      res = optimize_one_sided(spec.gamma, d, side);
    }
  } else {
    if (side == Side::both) {
      res = optimize_swap_two_sided(spec.gamma);
    } else {
      res = optimize_swap_one_sided(spec.gamma, side);
    }
  }

  std::cout << "target = " << to_string(res.target) << "\n";
  std::cout << "side = " << to_string(res.side) << "\n";
  std::cout << "candidates:\n";
  for (const CandidateSolution& cand : res.all_candidates) {
    std::cout << "  " << to_string(cand.kind) << "  fidelity = " << sig12(cand.fidelity)
              << "  x = " << sig12(cand.x) << "  y = " << sig12(cand.y) << "\n";
  }
  std::cout << "winner = " << to_string(res.best.kind) << "\n";
  std::cout << "fidelity = " << sig12(res.best.fidelity) << "\n";
  std::cout << "objective = " << sig12(res.best.objective) << "\n";
  std::cout << "S = " << mat2_text(res.best.s_matrix) << "\n";
  std::cout << "G = " << mat2_text(res.best.g_matrix) << "\n";
  if (res.side == Side::both) {
    std::cout << "S_alice = " << mat2_text(res.best.s_matrix_alice) << "\n";
    std::cout << "G_alice = " << mat2_text(res.best.g_matrix_alice) << "\n";
  }
  for (const std::string& note : res.notes) std::cout << "note: " << note << "\n";

  int rc = 0;
  if (verify) {
    double oracle_fidelity = 0.0;
    if (side == Side::both) {
      const oracle::TwoSidedGridOptimum grid = oracle::grid_search_two_sided(
          spec.gamma, teleport_target ? &d : nullptr, 2.0, 0.1);
      oracle_fidelity = grid.fidelity;
    } else {
      const CandidateSolution grid =
          oracle::grid_search_cp(spec.gamma, teleport_target ? &d : nullptr, side, 3.0, 0.05);
      oracle_fidelity = grid.fidelity;
    }
    std::cout << "oracle_fidelity = " << sig12(oracle_fidelity) << "\n";
    if (oracle_fidelity > res.best.fidelity + 1e-5) {
      std::cerr << "error: verify mismatch: grid search reached fidelity "
                << sig12(oracle_fidelity) << " above the reported optimum "
                << sig12(res.best.fidelity) << std::endl;
      rc = 3;
    }
  }

  if (!out_path.empty()) {
    nlohmann::json j;
    j["channel"] = nlohmann::json::parse(channel_to_json(spec));
    j["target"] = to_string(res.target);
    j["side"] = to_string(res.side);
    j["used_numeric_fallback"] = res.used_numeric_fallback;
    j["converged"] = res.converged;
    j["winner"] = candidate_json(res.best);
    nlohmann::json cands = nlohmann::json::array();
    for (const CandidateSolution& cand : res.all_candidates) cands.push_back(candidate_json(cand));
    j["candidates"] = cands;
    j["notes"] = res.notes;
    write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "wrote " << out_path << "\n";
  }
  return rc;
}

int run_sweep_cmd(double b0, double r_min, double r_max, int steps, const std::string& target_text,
                  const std::string& side_text, const std::string& out_path) {
  SweepSpec spec;
  spec.b0 = b0;
  spec.r_min = r_min;
  spec.r_max = r_max;
  spec.steps = steps;
  spec.target = target_text == "swap" ? SweepTarget::swap : SweepTarget::coherent;
  spec.side = parse_side(side_text);
  const std::vector<SweepRow> rows = run_sweep(spec);
  write_text_file(out_path, sweep_to_csv(rows));
  write_text_file(out_path + ".meta.json", sweep_sidecar_json(spec));
  std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
  std::cout << "wrote " << out_path << ".meta.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-variable teleportation fidelities and optimal local Gaussian maps"};
  app.require_subcommand(1);

  std::string fid_channel, fid_input;
  bool fid_swap = false, fid_verify = false;
  CLI::App* fid = app.add_subcommand("fidelity", "evaluate fidelities of a fixed channel");
  fid->add_option("--channel", fid_channel, "channel JSON or @file")->required();
  fid->add_option("--input", fid_input,
                  "input state: coherent, vacuum, squeezed:<s>, a 2x2 JSON matrix, or @file");
  fid->add_flag("--swap", fid_swap, "also report the entanglement-swapping fidelity");
  fid->add_flag("--verify", fid_verify, "cross-check against phase-space quadrature (exit 3 on mismatch)");

  std::string opt_channel, opt_input, opt_out;
  std::string opt_target = "coherent", opt_side = "bob";
  long long opt_seed = 0;
  bool opt_verify = false;
  CLI::App* opt = app.add_subcommand("optimize", "find the optimal local trace-preserving map");
  opt->add_option("--channel", opt_channel, "channel JSON or @file")->required();
  opt->add_option("--target", opt_target, "coherent or swap")
      ->check(CLI::IsMember({"coherent", "swap"}));
  opt->add_option("--side", opt_side, "which mode the map acts on: bob, alice, or both")
      ->check(CLI::IsMember({"bob", "alice", "both"}));
  opt->add_option("--input", opt_input, "input state for the coherent target (default coherent)");
  opt->add_option("--seed", opt_seed, "seed for stochastic verification paths (reserved)");
  opt->add_flag("--verify", opt_verify, "cross-check against a grid search (exit 3 on mismatch)");
  opt->add_option("--out", opt_out, "write a JSON report to this path");

  double sw_b0 = 0.0, sw_rmin = 0.0, sw_rmax = 1.0;
  int sw_steps = 101;
  std::string sw_target = "coherent", sw_side = "bob", sw_out;
  CLI::App* sw = app.add_subcommand("sweep", "sweep squeezing for the noisy two-mode-squeezed family");
  sw->add_option("--b0", sw_b0, "added classical noise on mode B")->required();
  sw->add_option("--r-min", sw_rmin, "lowest squeezing (default 0)");
  sw->add_option("--r-max", sw_rmax, "highest squeezing (default 1)");
  sw->add_option("--steps", sw_steps, "number of rows (default 101)");
  sw->add_option("--target", sw_target, "coherent or swap")
      ->check(CLI::IsMember({"coherent", "swap"}));
  sw->add_option("--side", sw_side, "which mode the map acts on: bob or alice")
      ->check(CLI::IsMember({"bob", "alice"}));
  sw->add_option("--out", sw_out, "CSV output path (a .meta.json sidecar is written next to it)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 2;
  }

  try {
    if (fid->parsed()) return run_fidelity(fid_channel, fid_input, fid_swap, fid_verify);
    if (opt->parsed())
      return run_optimize(opt_channel, opt_target, opt_side, opt_input, opt_verify, opt_out);
    return run_sweep_cmd(sw_b0, sw_rmin, sw_rmax, sw_steps, sw_target, sw_side, sw_out);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: malformed JSON: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const cvtel::SpecFormatError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const cvtel::ValidationError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 1;
  } catch (const cvtel::ComputationError& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << std::endl;
    return 1;
  }
}
