#include "otdro/config.hpp"

#include <fstream>
#include <stdexcept>

namespace otdro {

namespace {

Norm norm_from_string(const std::string& s) {
  if (s == "l2") return Norm::L2;
  if (s == "linf") return Norm::Linf;
  throw std::invalid_argument("unknown norm: " + s);
}

std::string norm_to_string(Norm n) { return n == Norm::L2 ? "l2" : "linf"; }

}  // namespace

FDivergence divergence_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "kl") return FDivergence::kl();
  if (family == "alpha") return FDivergence::alpha(j.at("alpha").get<double>());
  throw std::invalid_argument("unknown divergence family: " + family);
}

json divergence_to_json(const FDivergence& f) {
  if (f.family() == FDivergence::Family::KL) return json{{"family", "kl"}};
  return json{{"family", "alpha"}, {"alpha", f.alpha_param()}};
}

Penalty penalty_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "hard_ball") return Penalty::hard_ball();
  if (family == "power_law")
    return Penalty::power_law(j.at("alpha").get<double>(), j.at("q").get<double>());
  if (family == "power_plus_linear")
    return Penalty::power_plus_linear(j.at("alpha").get<double>(), j.at("eta").get<double>(),
                                      j.at("q").get<double>());
  if (family == "exponential")
    return Penalty::exponential(j.at("alpha").get<double>(), j.at("q").get<double>());
  throw std::invalid_argument("unknown penalty family: " + family);
}

json penalty_to_json(const Penalty& p) {
  json j{{"family", p.name()}};
  switch (p.family()) {
    case Penalty::Family::HardBall:
      break;
    case Penalty::Family::PowerLaw:
    case Penalty::Family::Exponential:
      j["alpha"] = p.alpha();
      j["q"] = p.q();
      break;
    case Penalty::Family::PowerPlusLinear:
      j["alpha"] = p.alpha();
      j["eta"] = p.eta();
      j["q"] = p.q();
      break;
  }
  return j;
}

TransportCost transport_cost_from_json(const json& j) {
  TransportCost c;
  c.penalty = penalty_from_json(j.at("penalty"));
  c.delta = j.value("delta", 0.0);
  c.norm = norm_from_string(j.value("norm", "l2"));
  c.M = j.value("M", 0.0);
  return c;
}

json transport_cost_to_json(const TransportCost& c) {
  return json{{"penalty", penalty_to_json(c.penalty)},
              {"delta", c.delta},
              {"norm", norm_to_string(c.norm)},
              {"M", c.M}};
}

ObjectiveFamily objective_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int k = j.at("k").get<int>();
  const double beta = j.at("beta").get<double>();
  const Norm norm = norm_from_string(j.value("norm", "l2"));
  std::optional<double> box;
  if (j.contains("box_b")) box = j.at("box_b").get<double>();
  if (kind == "clamped_linear_margin")
    return ObjectiveFamily::clamped_linear_margin(k, beta, norm, box);
  if (kind == "saturated_logistic")
    return ObjectiveFamily::saturated_logistic(k, beta, j.value("slope", 1.0), norm, box);
  throw std::invalid_argument("unknown objective kind: " + kind);
}

json objective_to_json(const ObjectiveFamily& f) {
  json j{{"kind", f.kind_name()},
         {"k", f.param_dim()},
         {"beta", f.beta()},
         {"norm", norm_to_string(f.x_norm())}};
  if (f.box_b()) j["box_b"] = *f.box_b();
  if (f.kind() == ObjectiveFamily::Kind::SaturatedLogistic) j["slope"] = f.slope();
  return j;
}

namespace {

MixtureParams mixture_from_json(const json& j) {
  MixtureParams m;
  m.dim = j.at("dim").get<int>();
  m.sigma = j.value("sigma", 0.5);
  m.p_pos = j.value("p_pos", 0.5);
  const auto& means = j.at("means");
  m.mean_neg_a = means.at("neg").at(0).get<std::vector<double>>();
  m.mean_neg_b = means.at("neg").at(1).get<std::vector<double>>();
  m.mean_pos_a = means.at("pos").at(0).get<std::vector<double>>();
  m.mean_pos_b = means.at("pos").at(1).get<std::vector<double>>();
  return m;
}

}  // namespace

Dataset dataset_from_json(const json& j, const ObjectiveFamily& fam) {
  if (j.contains("csv")) return Dataset::from_csv(j.at("csv").get<std::string>());
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    return synthesize_dataset(mixture_from_json(s), s.value("seed", 1), s.at("n").get<std::size_t>(),
                              fam.box_b());
  }
  throw std::invalid_argument("dataset: need \"csv\" or \"synthetic\"");
}

InnerSolverConfig inner_solver_from_json(const json& j) {
  InnerSolverConfig c;
  const std::string strat = j.value("strategy", "grid1d");
  if (strat == "grid1d") c.strategy = InnerSolverConfig::Strategy::Grid1D;
  else if (strat == "multistart") c.strategy = InnerSolverConfig::Strategy::MultiStartAscent;
  else throw std::invalid_argument("unknown inner strategy: " + strat);
  c.restarts = j.value("restarts", c.restarts);
  c.steps = j.value("steps", c.steps);
  c.step_size = j.value("step_size", c.step_size);
  c.grid_points = j.value("grid_points", c.grid_points);
  c.tolerance = j.value("tolerance", c.tolerance);
  if (c.restarts < 1 || !(c.tolerance > 0.0))
    throw std::invalid_argument("inner solver: restarts >= 1 and tolerance > 0 required");
  return c;
}

BoundConfig bound_config_from_json(const json& j) {
  BoundConfig c;
  if (j.contains("split_gamma")) c.split_gamma = j.at("split_gamma").get<double>();
  if (j.contains("split3")) {
    const auto v = j.at("split3").get<std::vector<double>>();
    if (v.size() != 3) throw std::invalid_argument("bounds: split3 must have 3 entries");
    c.split3 = {v[0], v[1], v[2]};
  }
  if (j.contains("lambda_n")) {
    c.lambda_n_rule.C = j.at("lambda_n").value("C", 1.0);
    c.lambda_n_rule.exponent = j.at("lambda_n").value("exponent", 0.5);
  }
  c.p0 = j.value("p0", c.p0);
  c.integration_points = j.value("integration_points", c.integration_points);
  return c;
}

DualProblem dual_problem_from_json(const json& root) {
  DualProblem p;
  p.fam = objective_from_json(root.at("objective"));
  p.cost = transport_cost_from_json(root.at("cost"));
  if (root.contains("divergence")) p.divergence = divergence_from_json(root.at("divergence"));
  p.r = root.at("radius").get<double>();
  p.theta = root.at("theta").get<std::vector<double>>();
  p.sample = dataset_from_json(root.at("dataset"), p.fam);
  if (root.contains("inner_solver")) p.inner = inner_solver_from_json(root.at("inner_solver"));
  p.outer_tol = root.value("outer_tol", p.outer_tol);
  return p;
}

ExperimentConfig experiment_config_from_json(const json& root) {
  ExperimentConfig c;
  const auto& e = root.at("experiment");
  c.scenario = scenario_from_name(e.at("scenario").get<std::string>());
  c.seed = e.value("seed", 1);
  c.n_train = e.at("n_train").get<std::size_t>();
  c.n_reference = e.at("n_reference").get<std::size_t>();
  c.trials = e.at("trials").get<int>();
  c.r = e.at("r").get<double>();
  c.eps_grid = e.at("eps_grid").get<std::vector<double>>();
  c.theta_grid_points = e.value("theta_grid_points", 0);
  c.threads = e.value("threads", 0);
  const std::string erm = e.value("erm_search", "grid");
  if (erm == "grid") c.erm_search = ErmSearch::Grid;
  else if (erm == "random") c.erm_search = ErmSearch::RandomSearch;
  else if (erm == "subgradient") c.erm_search = ErmSearch::SubgradientDescent;
  else throw std::invalid_argument("unknown erm_search: " + erm);
  c.erm_budget = e.value("erm_budget", 64);
  c.mixture = mixture_from_json(e.at("mixture"));
  c.fam = objective_from_json(root.at("objective"));
  c.cost = transport_cost_from_json(root.at("cost"));
  if (root.contains("divergence")) c.divergence = divergence_from_json(root.at("divergence"));
  if (root.contains("bounds")) c.bounds = bound_config_from_json(root.at("bounds"));
  if (root.contains("inner_solver")) c.inner = inner_solver_from_json(root.at("inner_solver"));
  c.outer_tol = root.value("outer_tol", c.outer_tol);
  return c;
}

json dual_solution_to_json(const DualSolution& s) {
  json j{{"value", s.value},
         {"lambda_opt", s.lambda_opt},
         {"evaluations", s.evaluations},
         {"certificate", s.certificate == Certificate::Exact ? "exact" : "lower_bound"},
         {"lambda_at_boundary", s.lambda_at_boundary}};
  if (s.nu_opt) j["nu_opt"] = *s.nu_opt;
  if (s.rho_opt) j["rho_opt"] = *s.rho_opt;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  json j;
  f >> j;
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace otdro
