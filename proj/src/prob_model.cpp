#include "minbrain/prob_model.hpp"

#include <algorithm>

namespace minbrain {

namespace {

int sorted_index(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
}

}  // namespace

template <class Scalar>
int ProbModel<Scalar>::state_index(const std::string& name) const {
    return sorted_index(states, name);
}
template <class Scalar>
int ProbModel<Scalar>::action_index(const std::string& name) const {
    return sorted_index(actions, name);
}
template <class Scalar>
int ProbModel<Scalar>::observation_index(const std::string& name) const {
    return sorted_index(observations, name);
}

template <class Scalar>
void validate_prob_model(const ProbModel<Scalar>& pm) {
    const int nx = static_cast<int>(pm.states.size());
    const int ny = static_cast<int>(pm.observations.size());
    if (nx == 0 || pm.actions.empty() || ny == 0) fail("InvalidSystem", "empty model component");
    if (static_cast<int>(pm.trans.size()) != static_cast<int>(pm.actions.size()))
        fail("InvalidSystem", "one transition kernel per action required");
    auto check_sum = [](const Scalar& sum, const char* what) {
        if (!is_zero<Scalar>(sum - Scalar(1))) fail("InvalidSystem", std::string(what) + " does not sum to 1");
    };
    for (const auto& kernel : pm.trans) {
        if (kernel.rows() != nx || kernel.cols() != nx)
            fail("InvalidSystem", "transition kernel has wrong shape");
        for (int x = 0; x < nx; ++x) {
            Scalar sum = Scalar(0);
            for (int x2 = 0; x2 < nx; ++x2) {
                if (kernel(x2, x) < Scalar(0)) fail("InvalidSystem", "negative probability");
                sum += kernel(x2, x);
            }
            check_sum(sum, "P(x'|x,u)");
        }
    }
    if (pm.obs.rows() != ny || pm.obs.cols() != nx)
        fail("InvalidSystem", "observation kernel has wrong shape");
    for (int x = 0; x < nx; ++x) {
        Scalar sum = Scalar(0);
        for (int y = 0; y < ny; ++y) {
            if (pm.obs(y, x) < Scalar(0)) fail("InvalidSystem", "negative probability");
            sum += pm.obs(y, x);
        }
        check_sum(sum, "P(y|x)");
    }
    if (pm.init.size() != nx) fail("InvalidSystem", "initial distribution has wrong shape");
    Scalar sum = Scalar(0);
    for (int x = 0; x < nx; ++x) {
        if (pm.init(x) < Scalar(0)) fail("InvalidSystem", "negative probability");
        sum += pm.init(x);
    }
    check_sum(sum, "initial distribution");
}

ProbModel<Rat> to_prob_model(const ExternalSystem& ext, const DisturbanceModel& dm,
                             const std::map<std::string, Rat>& initial) {
    if (dm.mode != DisturbanceModel::Mode::probabilistic)
        fail("InvalidSystem", "kernel derivation needs a probabilistic disturbance model");
    validate_disturbances(ext, dm);
    const int nx = static_cast<int>(ext.states.size());
    const int nu = static_cast<int>(ext.actions.size());
    const int ny = static_cast<int>(ext.observations.size());

    ProbModel<Rat> pm;
    pm.states = ext.states;
    pm.actions = ext.actions;
    pm.observations = ext.observations;
    pm.trans.assign(nu, Mat<Rat>::Zero(nx, nx));
    for (int u = 0; u < nu; ++u)
        for (int x = 0; x < nx; ++x)
            for (int t = 0; t < static_cast<int>(dm.thetas.size()); ++t)
                pm.trans[u](dm.f_theta[x][u][t], x) += dm.p_theta[x][u][t];
    pm.obs = Mat<Rat>::Zero(ny, nx);
    for (int x = 0; x < nx; ++x)
        for (int p = 0; p < static_cast<int>(dm.psis.size()); ++p)
            pm.obs(dm.h_psi[x][p], x) += dm.p_psi[x][p];
    pm.init = Vec<Rat>::Zero(nx);
    for (const auto& [name, mass] : initial) {
        int x = pm.state_index(name);
        if (x < 0) fail("InvalidSystem", "initial distribution over unknown state " + name);
        pm.init(x) = mass;
    }
    validate_prob_model(pm);
    return pm;
}

template <class Scalar>
ProbModel<Scalar> convert_model(const ProbModel<Rat>& pm) {
    if constexpr (std::is_same_v<Scalar, Rat>) {
        return pm;
    } else {
        ProbModel<double> out;
        out.states = pm.states;
        out.actions = pm.actions;
        out.observations = pm.observations;
        out.trans.reserve(pm.trans.size());
        for (const auto& kernel : pm.trans)
            out.trans.push_back(kernel.unaryExpr([](const Rat& v) { return v.get_d(); }));
        out.obs = pm.obs.unaryExpr([](const Rat& v) { return v.get_d(); });
        out.init = pm.init.unaryExpr([](const Rat& v) { return v.get_d(); });
        return out;
    }
}

template struct ProbModel<Rat>;
template struct ProbModel<double>;
template void validate_prob_model<Rat>(const ProbModel<Rat>&);
template void validate_prob_model<double>(const ProbModel<double>&);
template ProbModel<Rat> convert_model<Rat>(const ProbModel<Rat>&);
template ProbModel<double> convert_model<double>(const ProbModel<Rat>&);

}  // namespace minbrain
