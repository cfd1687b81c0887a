#include "minbrain/psr.hpp"

#include <algorithm>

#include "minbrain/linalg.hpp"

namespace minbrain {

std::string test_to_string(const ProbModel<Rat>& pm, const PsrTest& t) {
    std::string s;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        if (i) s += ".";
        s += pm.actions[t.steps[i].first] + ":" + pm.observations[t.steps[i].second];
    }
    return s;
}

namespace {

// One (u, y) forward step on an unnormalized weight vector.
template <class Scalar>
Vec<Scalar> forward(const ProbModel<Scalar>& pm, const Vec<Scalar>& a, int u, int y) {
    Vec<Scalar> next = pm.trans[u] * a;
    return next.cwiseProduct(pm.obs.row(y).transpose());
}

}  // namespace

template <class Scalar>
Scalar history_probability(const ProbModel<Scalar>& pm, const PairHistory& h) {
    Vec<Scalar> a = pm.init;
    for (auto [u, y] : h) a = forward(pm, a, u, y);
    return a.sum();
}

template <class Scalar>
Vec<Scalar> belief_after_history(const ProbModel<Scalar>& pm, const PairHistory& h) {
    Vec<Scalar> a = pm.init;
    for (auto [u, y] : h) a = forward(pm, a, u, y);
    Scalar norm = a.sum();
    if (is_zero(norm)) fail("ZeroProbabilityHistory", "conditioning on an impossible history");
    return a / norm;
}

template <class Scalar>
Scalar test_probability(const ProbModel<Scalar>& pm, const Vec<Scalar>& belief,
                        const PsrTest& t) {
    Vec<Scalar> a = belief;
    for (auto [u, y] : t.steps) a = forward(pm, a, u, y);
    return a.sum();
}

template <class Scalar>
Scalar exact_test_probability(const ProbModel<Scalar>& pm, const PairHistory& h,
                              const PsrTest& t) {
    return test_probability(pm, belief_after_history(pm, h), t);
}

template <class Scalar>
Vec<Scalar> psr_update(const LinearPsr<Scalar>& psr, const Vec<Scalar>& p, int u, int y) {
    auto rp = psr.r_pair.find({u, y});
    auto re = psr.r_ext.find({u, y});
    if (rp == psr.r_pair.end() || re == psr.r_ext.end())
        fail("InvalidSystem", "PSR has no weights for this (u, y)");
    Scalar denom = rp->second.dot(p);
    if (is_zero(denom))
        fail("ImpossibleObservation",
             "observation has probability zero under the prediction vector");
    return (re->second * p) / denom;
}

namespace {

template <class Scalar>
struct OutcomeMatrix {
    std::vector<Vec<Scalar>> beliefs;    // one per positive-probability history
    std::vector<PsrTest> tests;          // canonical order
    std::vector<Vec<Scalar>> columns;    // per test: P_h(t) across histories
};

// Histories and test columns up to max_len. Columns are filled by walking
// the test tree once per history belief.
template <class Scalar>
OutcomeMatrix<Scalar> build_outcome_matrix(const ProbModel<Scalar>& pm, int max_len) {
    OutcomeMatrix<Scalar> m;
    const int nu = static_cast<int>(pm.actions.size());
    const int ny = static_cast<int>(pm.observations.size());

    // Positive-probability histories, breadth-first.
    std::vector<std::pair<PairHistory, Vec<Scalar>>> frontier;
    frontier.emplace_back(PairHistory{}, pm.init);
    m.beliefs.push_back(pm.init);
    std::size_t begin = 0;
    for (int len = 1; len <= max_len; ++len) {
        std::size_t end = frontier.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (int u = 0; u < nu; ++u) {
                for (int y = 0; y < ny; ++y) {
                    Vec<Scalar> a = forward(pm, frontier[i].second, u, y);
                    Scalar norm = a.sum();
                    if (is_zero(norm)) continue;
                    PairHistory h = frontier[i].first;
                    h.emplace_back(u, y);
                    frontier.emplace_back(std::move(h), (a / norm).eval());
                    m.beliefs.push_back(frontier.back().second);
                }
            }
        }
        begin = end;
    }

    // Canonical test order and the corresponding columns; the test tree is
    // walked depth-first level by level so the order is (length, lex).
    const int rows = static_cast<int>(m.beliefs.size());
    std::vector<std::pair<PsrTest, std::vector<Vec<Scalar>>>> level;
    {
        std::vector<Vec<Scalar>> base = m.beliefs;
        level.emplace_back(PsrTest{}, std::move(base));
    }
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::pair<PsrTest, std::vector<Vec<Scalar>>>> next;
        for (const auto& [prefix, vectors] : level) {
            for (int u = 0; u < nu; ++u) {
                for (int y = 0; y < ny; ++y) {
                    PsrTest t = prefix;
                    t.steps.emplace_back(u, y);
                    std::vector<Vec<Scalar>> advanced(rows);
                    Vec<Scalar> column(rows);
                    for (int r = 0; r < rows; ++r) {
                        advanced[r] = forward(pm, vectors[r], u, y);
                        column(r) = advanced[r].sum();
                    }
                    m.tests.push_back(t);
                    m.columns.push_back(std::move(column));
                    next.emplace_back(std::move(t), std::move(advanced));
                }
            }
        }
        level = std::move(next);
    }
    // Sort tests of equal length lexicographically while keeping columns
    // aligned (the tree walk yields lexicographic order already, but the
    // (length, lex) ordering is restored here against any reshuffling).
    std::vector<std::size_t> order(m.tests.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m.tests[a] < m.tests[b]; });
    std::vector<PsrTest> tests;
    std::vector<Vec<Scalar>> columns;
    for (std::size_t i : order) {
        tests.push_back(std::move(m.tests[i]));
        columns.push_back(std::move(m.columns[i]));
    }
    m.tests = std::move(tests);
    m.columns = std::move(columns);
    return m;
}

}  // namespace

template <class Scalar>
LinearPsr<Scalar> discover_core_tests(const ProbModel<Scalar>& pm, int max_len) {
    if (max_len < 1) fail("InvalidSystem", "max_len must be at least 1");
    OutcomeMatrix<Scalar> m = build_outcome_matrix(pm, max_len);

    LinearPsr<Scalar> psr;
    psr.actions = pm.actions;
    psr.observations = pm.observations;

    ColumnSpace<Scalar> space;
    std::vector<int> core_cols;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        if (space.insert(m.columns[c])) {
            core_cols.push_back(static_cast<int>(c));
            psr.core.push_back(m.tests[c]);
        }
    }
    const int k = static_cast<int>(psr.core.size());
    const int rows = static_cast<int>(m.beliefs.size());
    Mat<Scalar> a(rows, k);
    for (int j = 0; j < k; ++j) a.col(j) = m.columns[core_cols[j]];

    auto solve_for = [&](const PsrTest& t) -> Vec<Scalar> {
        Vec<Scalar> column(rows);
        for (int r = 0; r < rows; ++r) column(r) = test_probability(pm, m.beliefs[r], t);
        auto x = solve_full_column_rank<Scalar>(a, column);
        if (!x)
            fail("RankDeficientExtensions",
                 "prediction weights unsolvable at max_len " + std::to_string(max_len) +
                     "; retry with max_len " + std::to_string(max_len + 1));
        return *x;
    };

    for (int u = 0; u < static_cast<int>(pm.actions.size()); ++u) {
        for (int y = 0; y < static_cast<int>(pm.observations.size()); ++y) {
            PsrTest pair;
            pair.steps.emplace_back(u, y);
            psr.r_pair[{u, y}] = solve_for(pair);
            Mat<Scalar> ext(k, k);
            for (int i = 0; i < k; ++i) {
                PsrTest t;
                t.steps.emplace_back(u, y);
                t.steps.insert(t.steps.end(), psr.core[i].steps.begin(),
                               psr.core[i].steps.end());
                ext.row(i) = solve_for(t).transpose();
            }
            psr.r_ext[{u, y}] = std::move(ext);
        }
    }

    psr.m0 = Vec<Scalar>(k);
    for (int i = 0; i < k; ++i) psr.m0(i) = test_probability(pm, pm.init, psr.core[i]);
    return psr;
}

template Rat history_probability<Rat>(const ProbModel<Rat>&, const PairHistory&);
template double history_probability<double>(const ProbModel<double>&, const PairHistory&);
template Vec<Rat> belief_after_history<Rat>(const ProbModel<Rat>&, const PairHistory&);
template Vec<double> belief_after_history<double>(const ProbModel<double>&, const PairHistory&);
template Rat test_probability<Rat>(const ProbModel<Rat>&, const Vec<Rat>&, const PsrTest&);
template double test_probability<double>(const ProbModel<double>&, const Vec<double>&,
                                         const PsrTest&);
template Rat exact_test_probability<Rat>(const ProbModel<Rat>&, const PairHistory&,
                                         const PsrTest&);
template double exact_test_probability<double>(const ProbModel<double>&, const PairHistory&,
                                               const PsrTest&);
template Vec<Rat> psr_update<Rat>(const LinearPsr<Rat>&, const Vec<Rat>&, int, int);
template Vec<double> psr_update<double>(const LinearPsr<double>&, const Vec<double>&, int, int);
template LinearPsr<Rat> discover_core_tests<Rat>(const ProbModel<Rat>&, int);
template LinearPsr<double> discover_core_tests<double>(const ProbModel<double>&, int);

}  // namespace minbrain
