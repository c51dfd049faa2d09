#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "otdro/config.hpp"
#include "otdro/primal_oracle.hpp"

namespace {

using namespace otdro;

int cmd_dual_value(const std::string& config_path, const std::string& out_path) {
  const json root = load_json_file(config_path);
  const DualProblem prob = dual_problem_from_json(root);
  DualSolution sol;
  if (!prob.divergence) sol = ot_dro_dual(prob);
  else if (prob.divergence->family() == FDivergence::Family::KL) sol = kl_dro_dual(prob);
  else sol = otreg_fdiv_dual(prob);
  const json out = dual_solution_to_json(sol);
  if (!out_path.empty()) save_json_file(out_path, out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_primal_check(const std::string& config_path, const std::string& out_path) {
  const json root = load_json_file(config_path);
  DualProblem prob = dual_problem_from_json(root);
  const auto& pc = root.value("primal_check", json::object());
  const int grid = pc.value("grid_per_source", 24);
  const double max_radius = pc.value("max_radius", 2.0);
  const double tol = pc.value("tol", 1e-5);

  DualSolution dual;
  if (!prob.divergence) dual = ot_dro_dual(prob);
  else if (prob.divergence->family() == FDivergence::Family::KL) dual = kl_dro_dual(prob);
  else dual = otreg_fdiv_dual(prob);

  // Candidate grids seeded with the dual solver's inner argmax points.
  std::vector<std::vector<std::vector<double>>> extras(prob.sample.size());
  if (dual.lambda_opt > 0.0) {
    for (std::size_t i = 0; i < prob.sample.points.size(); ++i) {
      TransformResult t = c_transform(prob.fam, prob.theta, prob.cost, dual.lambda_opt,
                                      prob.sample.points[i], prob.inner);
      extras[i].push_back(t.argmax_x);
    }
  }
  const FiniteInstance inst =
      make_finite_instance(prob.fam, prob.theta, prob.cost, prob.sample, grid, max_radius,
                           extras);
  double primal = 0.0;
  if (!prob.divergence) {
    primal = ot_primal_lp(inst, prob.r);
  } else {
    OtRegPrimalConfig cfg;
    primal = otreg_primal_convex(inst, *prob.divergence, prob.r, cfg).value;
  }
  const DualityReport rep =
      weak_duality_check(primal, dual.value, dual.certificate, tol * (1.0 + std::fabs(dual.value)));

  std::printf("%-10s %-16s %-16s %-12s %s\n", "instance", "primal", "dual", "gap", "status");
  std::printf("%-10d %-16.9g %-16.9g %-12.3g %s\n", 0, rep.primal, rep.dual, rep.gap,
              rep.ok ? "PASS" : "FAIL");
  if (!out_path.empty()) {
    json out{{"primal", rep.primal}, {"dual", rep.dual}, {"gap", rep.gap}, {"ok", rep.ok},
             {"message", rep.message}};
    save_json_file(out_path, out);
  }
  return rep.ok ? 0 : 1;
}

int cmd_bounds(const std::string& config_path, const std::string& out_path) {
  const json root = load_json_file(config_path);
  const ObjectiveFamily fam = objective_from_json(root.at("objective"));
  const TransportCost cost = transport_cost_from_json(root.at("cost"));
  const FDivergence f = divergence_from_json(root.at("divergence"));
  const BoundConfig cfg = bound_config_from_json(root.value("bounds", json::object()));
  const double n = root.at("n").get<double>();
  const std::vector<double> p_y =
      root.value("p_y", std::vector<double>{0.5, 0.5});
  const std::vector<double> eps_grid =
      root.value("eps_grid", std::vector<double>{0.05, 0.1, 0.2});

  const BoundReport rep = compute_bound_report(fam, cost, f, n, cfg, p_y, eps_grid);
  json out{{"D_n", rep.D_n},
           {"R_n", rep.R_n},
           {"R_n_tilde", rep.R_n_tilde},
           {"C1", rep.C1},
           {"C2", rep.C2},
           {"lambda_n", rep.lambda_n},
           {"log", {{"D_n", std::log(rep.D_n)}, {"R_n", std::log(rep.R_n)},
                    {"R_n_tilde", std::log(rep.R_n_tilde)}}},
           {"constants",
            {{"beta", rep.beta},
             {"L_X", rep.L_X},
             {"L_Theta", rep.L_Theta},
             {"M", rep.M},
             {"k", rep.k},
             {"s0", rep.consts.s0},
             {"nu_tilde", rep.consts.nu_tilde},
             {"inf_f_star", rep.consts.inf_f_star},
             {"tail_sup", rep.consts.tail_sup},
             {"p0", rep.consts.p0}}}};
  json tails = json::array();
  for (const auto& [eps, tail] : rep.value_tails)
    tails.push_back({{"eps", eps}, {"tail", tail.value}, {"clamped", tail.clamped}});
  out["value_tails"] = tails;
  if (!out_path.empty()) save_json_file(out_path, out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_experiment_command(const std::string& config_path, const std::string& out_dir,
                           bool erm) {
  const json root = load_json_file(config_path);
  ExperimentConfig cfg = experiment_config_from_json(root);
  const ExperimentOutput out = erm ? run_erm_experiment(cfg) : run_concentration(cfg);
  std::filesystem::create_directories(out_dir);
  write_trials_csv(out_dir + "/trials.csv", out.records, cfg.fam.param_dim());
  write_summary_csv(out_dir + "/summary.csv", out.summary);
  write_summary_json(out_dir + "/summary.json", out.summary);
  double total_wall = 0.0;
  for (const auto& r : out.records) total_wall += r.wall_time;
  std::printf("scenario=%s trials=%zu envelope=%.6g reference=%.9g wall=%.1fs\n",
              scenario_name(out.summary.scenario).c_str(), out.records.size(),
              out.summary.envelope, out.summary.reference_value, total_wall);
  for (const auto& row : out.summary.rows)
    std::printf("  eps=%-8.4g tail=%-12.4g freq=%-12.4g stderr=%-10.3g %s\n", row.eps,
                row.tail, row.empirical_freq, row.binom_stderr,
                row.consistent ? "CONSISTENT" : "INCONSISTENT");
  return out.summary.all_consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust optimization duals, oracles and bound calculators"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir, trials_csv, summary_csv;

  auto* dual = app.add_subcommand("dual-value", "Evaluate the dual robust risk for a config");
  dual->add_option("--config", config_path, "JSON config")->required();
  dual->add_option("--out", out_path, "output JSON path");

  auto* primal = app.add_subcommand("primal-check", "Primal/dual agreement on a finite instance");
  primal->add_option("--config", config_path, "JSON config")->required();
  primal->add_option("--out", out_path, "output JSON path");

  auto* bounds = app.add_subcommand("bounds", "Compute the certificate quantities");
  bounds->add_option("--config", config_path, "JSON config")->required();
  bounds->add_option("--out", out_path, "output JSON path");

  auto* conc = app.add_subcommand("concentration-experiment", "Monte Carlo deviation experiment");
  conc->add_option("--config", config_path, "JSON config")->required();
  conc->add_option("--out", out_dir, "output directory")->required();

  auto* erm = app.add_subcommand("erm-experiment", "Monte Carlo ERM excess experiment");
  erm->add_option("--config", config_path, "JSON config")->required();
  erm->add_option("--out", out_dir, "output directory")->required();

  auto* plots = app.add_subcommand("plots", "Render SVG plots from a trials CSV");
  plots->add_option("--csv", trials_csv, "trials CSV")->required();
  plots->add_option("--summary", summary_csv, "summary CSV (default: sibling summary.csv)");
  plots->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (dual->parsed()) return cmd_dual_value(config_path, out_path);
    if (primal->parsed()) return cmd_primal_check(config_path, out_path);
    if (bounds->parsed()) return cmd_bounds(config_path, out_path);
    if (conc->parsed()) return run_experiment_command(config_path, out_dir, false);
    if (erm->parsed()) return run_experiment_command(config_path, out_dir, true);
    if (plots->parsed()) {
      if (summary_csv.empty())
        summary_csv = std::filesystem::path(trials_csv).parent_path() / "summary.csv";
      for (const auto& p : otdro::emit_plots(trials_csv, summary_csv, out_dir))
        std::cout << p << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
