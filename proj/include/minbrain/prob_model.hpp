#pragma once

#include <map>
#include <string>
#include <vector>

#include "minbrain/errors.hpp"
#include "minbrain/external.hpp"
#include "minbrain/rational.hpp"

namespace minbrain {

// Finite generative model: transition kernel P(x'|x,u), observation kernel
// P(y|x), initial distribution. Templated on the scalar; the rational
// instantiation is exact.
template <class Scalar>
struct ProbModel {
    std::vector<std::string> states;          // sorted unique
    std::vector<std::string> actions;         // sorted unique
    std::vector<std::string> observations;    // sorted unique
    std::vector<Mat<Scalar>> trans;           // per action u: (x', x)
    Mat<Scalar> obs;                          // (y, x)
    Vec<Scalar> init;

    int state_index(const std::string& name) const;
    int action_index(const std::string& name) const;
    int observation_index(const std::string& name) const;
};

template <class Scalar>
void validate_prob_model(const ProbModel<Scalar>& pm);

// Kernels induced by an external system with a probabilistic disturbance
// model: P(x'|x,u) from P(theta|x,u) and f, P(y|x) from P(psi|x) and h.
ProbModel<Rat> to_prob_model(const ExternalSystem& ext, const DisturbanceModel& dm,
                             const std::map<std::string, Rat>& initial);

template <class Scalar>
ProbModel<Scalar> convert_model(const ProbModel<Rat>& pm);

}  // namespace minbrain
