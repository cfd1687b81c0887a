#pragma once

#include <json.hpp>
#include <string>

#include "minbrain/coupled.hpp"
#include "minbrain/core.hpp"
#include "minbrain/dbi.hpp"
#include "minbrain/external.hpp"
#include "minbrain/history.hpp"
#include "minbrain/prob_model.hpp"
#include "minbrain/psr.hpp"
#include "minbrain/refine.hpp"

namespace minbrain {

using Json = nlohmann::json;

// Shared system format:
// {"states": [...], "labels": [...], "transitions": [["s","l","s'"], ...],
//  "state_labels": {"s": "l", ...}?, "initial": "s"?}
Json system_to_json(const TransitionSystem& sys);
Json srts_to_json(const StateRelabeledSystem& m);
TransitionSystem system_from_json(const Json& j);
StateRelabeledSystem srts_from_json(const Json& j);

// {"blocks": [["s1","s2"], ...]}
Json partition_to_json(const Partition& p);
Partition partition_from_json(const Json& j);

Json refinement_to_json(const RefinementResult& r);

// {"alphabet_u": [...], "alphabet_y": [...], "states": [...],
//  "delta": {"(s,u,y)": "s'"}, "output": {"s": "label"}, "initial": "s"}
Json task_machine_to_json(const TaskMachine& m);
TaskMachine task_machine_from_json(const Json& j);

// External systems and Moore machines reuse the shared system format:
// edges are actions, state labels are the sensor outputs.
Json external_to_json(const ExternalSystem& ext);
ExternalSystem external_from_json(const Json& j);
Json moore_to_json(const MooreMachine& m);
MooreMachine moore_from_json(const Json& j);

Json disturbances_to_json(const ExternalSystem& ext, const DisturbanceModel& dm);
DisturbanceModel disturbances_from_json(const Json& j, const ExternalSystem& ext);

// {"external": ..., "internal": ..., "policy": {...},
//  "initial_internal": "...", "disturbances": ...?}
// Planner-shaped internals (pair edge labels) are strong-restricted by the
// policy on load.
Json coupled_to_json(const CoupledSystem& cs);
CoupledSystem coupled_from_json(const Json& j);

// Rational tables accepted as "p/q" strings or decimals.
Json prob_model_to_json(const ProbModel<Rat>& pm);
ProbModel<Rat> prob_model_from_json(const Json& j);

Json psr_to_json(const LinearPsr<Rat>& psr);

Json update_graph_to_json(const MooreMachine& m, const UpdateGraph& g);

Json rollout_to_json(const Rollout& r);
std::string rollout_to_json_lines(const Rollout& r);

// DOT export: states as nodes annotated with their labels, edges annotated
// with the transition label.
std::string to_dot(const TransitionSystem& sys, const std::string& graph_name = "system");
std::string to_dot(const StateRelabeledSystem& m, const std::string& graph_name = "system");

}  // namespace minbrain
