#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "minbrain/prob_model.hpp"
#include "minbrain/rational.hpp"

namespace minbrain {

// A test is a finite experiment: apply u_1 .. u_m and require the
// observation sequence y_1 .. y_m, held as (u, y) index pairs. Histories
// use the same shape; the null history is the empty sequence.
struct PsrTest {
    std::vector<std::pair<int, int>> steps;

    bool operator<(const PsrTest& other) const {
        if (steps.size() != other.steps.size()) return steps.size() < other.steps.size();
        return steps < other.steps;
    }
    bool operator==(const PsrTest& other) const { return steps == other.steps; }
};

using PairHistory = std::vector<std::pair<int, int>>;

std::string test_to_string(const ProbModel<Rat>& pm, const PsrTest& t);

// P(eta): probability of the observation sequence under the actions.
template <class Scalar>
Scalar history_probability(const ProbModel<Scalar>& pm, const PairHistory& h);

// Posterior P(x | eta); ZeroProbabilityHistory when P(eta) = 0.
template <class Scalar>
Vec<Scalar> belief_after_history(const ProbModel<Scalar>& pm, const PairHistory& h);

// Conditional success probability of t from a given belief.
template <class Scalar>
Scalar test_probability(const ProbModel<Scalar>& pm, const Vec<Scalar>& belief,
                        const PsrTest& t);

// P_eta(t) by exact forward propagation through the model.
template <class Scalar>
Scalar exact_test_probability(const ProbModel<Scalar>& pm, const PairHistory& h,
                              const PsrTest& t);

// Linear PSR over a core test set Q: prediction weights for every pair
// (u, y) and every one-pair extension of a core test.
template <class Scalar>
struct LinearPsr {
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    std::vector<PsrTest> core;
    Vec<Scalar> m0;
    std::map<std::pair<int, int>, Vec<Scalar>> r_pair;    // r_{(u,y)}
    std::map<std::pair<int, int>, Mat<Scalar>> r_ext;     // row i: r_{(u,y) ^ t_i}
};

// Component i of the next prediction vector:
// (r_{(u,y)^t_i} . p) / (r_{(u,y)} . p).
// Errors: ImpossibleObservation when the denominator is zero.
template <class Scalar>
Vec<Scalar> psr_update(const LinearPsr<Scalar>& psr, const Vec<Scalar>& p, int u, int y);

// Core-test discovery from the bounded outcome matrix: rows are the
// positive-probability histories up to max_len, columns the tests up to
// max_len in canonical (length, then lexicographic) order; the greedy
// maximal independent column set is the core, and the prediction weights
// solve the corresponding linear systems exactly.
// Errors: RankDeficientExtensions when some required weight system is
// unsolvable at this bound.
template <class Scalar>
LinearPsr<Scalar> discover_core_tests(const ProbModel<Scalar>& pm, int max_len);

}  // namespace minbrain
