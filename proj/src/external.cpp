#include "minbrain/external.hpp"

#include <algorithm>

#include "minbrain/errors.hpp"

namespace minbrain {

namespace {

int sorted_index(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
}

std::vector<std::string> sorted_unique(std::vector<std::string> names, const char* what) {
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail("InvalidSystem", std::string("duplicate ") + what + " identifier");
    if (names.empty()) fail("InvalidSystem", std::string("empty ") + what + " set");
    return names;
}

}  // namespace

int ExternalSystem::state_index(const std::string& name) const {
    return sorted_index(states, name);
}
int ExternalSystem::action_index(const std::string& name) const {
    return sorted_index(actions, name);
}
int ExternalSystem::observation_index(const std::string& name) const {
    return sorted_index(observations, name);
}

ExternalSystem make_external(std::vector<std::string> states, std::vector<std::string> actions,
                             std::vector<std::string> observations,
                             const std::map<std::pair<std::string, std::string>, std::string>& f,
                             const std::map<std::string, std::string>& h) {
    ExternalSystem ext;
    ext.states = sorted_unique(std::move(states), "state");
    ext.actions = sorted_unique(std::move(actions), "action");
    ext.observations = sorted_unique(std::move(observations), "observation");
    ext.f.assign(ext.states.size(), std::vector<int>(ext.actions.size(), -1));
    ext.h.assign(ext.states.size(), -1);
    for (const auto& [key, dst] : f) {
        int x = ext.state_index(key.first);
        int u = ext.action_index(key.second);
        int d = ext.state_index(dst);
        if (x < 0 || u < 0 || d < 0) fail("InvalidSystem", "f references unknown identifier");
        ext.f[x][u] = d;
    }
    for (const auto& [x_name, y_name] : h) {
        int x = ext.state_index(x_name);
        int y = ext.observation_index(y_name);
        if (x < 0 || y < 0) fail("InvalidSystem", "h references unknown identifier");
        ext.h[x] = y;
    }
    for (std::size_t x = 0; x < ext.states.size(); ++x) {
        if (ext.h[x] < 0) fail("InvalidSystem", "h is not total at " + ext.states[x]);
        for (std::size_t u = 0; u < ext.actions.size(); ++u)
            if (ext.f[x][u] < 0)
                fail("InvalidSystem",
                     "f is not total at (" + ext.states[x] + ", " + ext.actions[u] + ")");
    }
    return ext;
}

int DisturbanceModel::theta_index(const std::string& name) const {
    return sorted_index(thetas, name);
}
int DisturbanceModel::psi_index(const std::string& name) const {
    return sorted_index(psis, name);
}

void validate_disturbances(const ExternalSystem& ext, const DisturbanceModel& dm) {
    const std::size_t nx = ext.states.size();
    const std::size_t nu = ext.actions.size();
    const std::size_t nt = dm.thetas.size();
    const std::size_t np = dm.psis.size();
    if (nt == 0 || np == 0) fail("InvalidSystem", "empty disturbance set");
    if (dm.f_theta.size() != nx || dm.h_psi.size() != nx)
        fail("InvalidSystem", "disturbance dynamics do not match the external system");
    for (std::size_t x = 0; x < nx; ++x) {
        if (dm.f_theta[x].size() != nu || dm.h_psi[x].size() != np)
            fail("InvalidSystem", "disturbance dynamics do not match the external system");
        for (std::size_t u = 0; u < nu; ++u)
            if (dm.f_theta[x][u].size() != nt)
                fail("InvalidSystem", "disturbance dynamics do not match the external system");
    }
    if (dm.mode == DisturbanceModel::Mode::nondeterministic) {
        for (std::size_t x = 0; x < nx; ++x) {
            bool any_psi = false;
            for (std::size_t p = 0; p < np; ++p) any_psi |= dm.psi_ok[x][p] != 0;
            if (!any_psi) fail("InvalidSystem", "Psi(x) empty at " + ext.states[x]);
            for (std::size_t u = 0; u < nu; ++u) {
                bool any = false;
                for (std::size_t t = 0; t < nt; ++t) any |= dm.theta_ok[x][u][t] != 0;
                if (!any)
                    fail("InvalidSystem", "Theta(x,u) empty at (" + ext.states[x] + ", " +
                                              ext.actions[u] + ")");
            }
        }
    } else {
        for (std::size_t x = 0; x < nx; ++x) {
            Rat sum_psi = 0;
            for (std::size_t p = 0; p < np; ++p) {
                if (dm.p_psi[x][p] < 0) fail("InvalidSystem", "negative probability");
                sum_psi += dm.p_psi[x][p];
            }
            if (sum_psi != 1) fail("InvalidSystem", "P(psi|x) does not sum to 1");
            for (std::size_t u = 0; u < nu; ++u) {
                Rat sum = 0;
                for (std::size_t t = 0; t < nt; ++t) {
                    if (dm.p_theta[x][u][t] < 0) fail("InvalidSystem", "negative probability");
                    sum += dm.p_theta[x][u][t];
                }
                if (sum != 1) fail("InvalidSystem", "P(theta|x,u) does not sum to 1");
            }
        }
    }
}

}  // namespace minbrain
