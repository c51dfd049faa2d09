#pragma once

#include <json.hpp>

#include "otdro/dual_solver.hpp"
#include "otdro/experiment.hpp"

namespace otdro {

using json = nlohmann::json;

FDivergence divergence_from_json(const json& j);
json divergence_to_json(const FDivergence& f);

Penalty penalty_from_json(const json& j);
json penalty_to_json(const Penalty& p);

TransportCost transport_cost_from_json(const json& j);
json transport_cost_to_json(const TransportCost& c);

ObjectiveFamily objective_from_json(const json& j);
json objective_to_json(const ObjectiveFamily& f);

Dataset dataset_from_json(const json& j, const ObjectiveFamily& fam);

InnerSolverConfig inner_solver_from_json(const json& j);
BoundConfig bound_config_from_json(const json& j);

// Whole-document parses for the CLI subcommands.
DualProblem dual_problem_from_json(const json& root);
ExperimentConfig experiment_config_from_json(const json& root);

json dual_solution_to_json(const DualSolution& s);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace otdro
