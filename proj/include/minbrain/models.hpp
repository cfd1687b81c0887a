#pragma once

#include "minbrain/coupled.hpp"
#include "minbrain/core.hpp"
#include "minbrain/external.hpp"
#include "minbrain/history.hpp"

namespace minbrain {

// --- Red-green gates --------------------------------------------------------
//
// An annulus split into two regions by one red and one green gate. The robot
// observes the color of each crossing; bouncing motions u_g / u_r traverse
// only the matching gate, and the gate colors around any region alternate,
// so consistent rotation shows up as color alternation in the history.

// Reference four-state consistency filter (root, last-red, last-green,
// violated), labeled with the task verdict "1"/"0".
StateRelabeledSystem red_green_filter();

// The same machine as an observation-only task labeling over Y* histories.
TaskMachine red_green_task_machine();

// The same machine emitting its own states: the refined I-map kappa'.
TaskMachine red_green_refined_machine();

// Finite abstraction of the annulus: region crossed with the color of the
// gate last crossed. Initial states carry the first crossing.
ExternalSystem red_green_annulus();

// The consistency policy over (U x Y)* histories as a machine: after r
// apply u_g, after g apply u_r, nothing at the root.
TaskMachine red_green_plan_policy_machine();

// Reference three-state plan executor over Y, labeled with the reduced
// policy ("" at the root, then u_g / u_r).
StateRelabeledSystem red_green_executor();

// Executor coupled to the annulus.
CoupledSystem red_green_coupled();

// --- L-shaped corridor ------------------------------------------------------
//
// Environments E(l1, l2) for 1 <= l1, l2 <= lmax: a horizontal arm of cells
// (0,0)..(l1,0) and a vertical arm (l1,0)..(l1,l2). The robot moves right or
// up one cell (blocked moves leave it in place), and the sensor reports 1
// exactly when the cell ahead in the current heading is a wall.

ExternalSystem corridor_external(int lmax);

// All initial states (0,0) heading right, one per environment.
std::vector<int> corridor_initial_set(const ExternalSystem& ext);

// Right-until-blocked, then up-until-blocked, as a three-state executor.
CoupledSystem corridor_coupled(int lmax);

std::string corridor_state_name(int q1, int q2, int l1, int l2, bool heading_up);

// --- Binary toy model -------------------------------------------------------

// Planner DITS with I = U = Y = {0,1} and phi(i,(u,y)) = |y-u|.
TransitionSystem binary_toy_planner();

// The policy pi(i) = i.
std::map<std::string, std::string> binary_toy_policy();

}  // namespace minbrain
