#pragma once

#include <map>
#include <string>
#include <vector>

#include "minbrain/rational.hpp"

namespace minbrain {

// Deterministic external system (X, U, f, h, Y). Identifiers are kept
// sorted; f and h are total.
struct ExternalSystem {
    std::vector<std::string> states;          // X, sorted unique
    std::vector<std::string> actions;         // U, sorted unique
    std::vector<std::string> observations;    // Y, sorted unique
    std::vector<std::vector<int>> f;          // [x][u] -> x
    std::vector<int> h;                       // [x] -> y

    int state_index(const std::string& name) const;
    int action_index(const std::string& name) const;
    int observation_index(const std::string& name) const;
};

ExternalSystem make_external(std::vector<std::string> states,
                             std::vector<std::string> actions,
                             std::vector<std::string> observations,
                             const std::map<std::pair<std::string, std::string>, std::string>& f,
                             const std::map<std::string, std::string>& h);

// Disturbances entering the transition function and the sensor. In the
// nondeterministic mode admissible subsets are given; in the probabilistic
// mode conditional distributions (exact rationals, rows sum to one).
// The disturbance-extended dynamics f(x,u,theta) and h(x,psi) live here;
// they must collapse to the base system's f and h on the designated
// undisturbed elements when those exist.
struct DisturbanceModel {
    enum class Mode { nondeterministic, probabilistic };

    Mode mode = Mode::nondeterministic;
    std::vector<std::string> thetas;    // sorted unique
    std::vector<std::string> psis;

    std::vector<std::vector<std::vector<int>>> f_theta;    // [x][u][theta] -> x
    std::vector<std::vector<int>> h_psi;                   // [x][psi] -> y

    // Nondeterministic admissibility Theta(x,u), Psi(x); nonempty rows.
    std::vector<std::vector<std::vector<char>>> theta_ok;    // [x][u][theta]
    std::vector<std::vector<char>> psi_ok;                   // [x][psi]

    // Probabilistic tables; rows sum to one exactly.
    std::vector<std::vector<std::vector<Rat>>> p_theta;    // [x][u][theta]
    std::vector<std::vector<Rat>> p_psi;                   // [x][psi]

    int theta_index(const std::string& name) const;
    int psi_index(const std::string& name) const;
};

void validate_disturbances(const ExternalSystem& ext, const DisturbanceModel& dm);

}  // namespace minbrain
