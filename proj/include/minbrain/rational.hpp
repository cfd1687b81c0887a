#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <string>

#include "minbrain/errors.hpp"

namespace minbrain {

// Exact rational scalar used wherever an operation promises exact
// arithmetic (probability tables, PSR weights, belief vectors).
using Rat = mpq_class;

// Accepts "p/q", plain integers, and decimal strings ("0.25" -> 1/4).
Rat parse_rational(const std::string& text);

std::string rational_to_string(const Rat& value);

// Shared dense containers. Algorithms are templated on the scalar so the
// same code path runs in double and in exact mode.
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Comparison tolerance: exact for rationals, fixed epsilon for doubles.
template <class Scalar>
inline bool is_zero(const Scalar& v) {
    return v == Scalar(0);
}
template <>
inline bool is_zero<double>(const double& v) {
    return v > -1e-12 && v < 1e-12;
}

template <class Scalar>
Scalar scalar_from_string(const std::string& text);

template <>
inline Rat scalar_from_string<Rat>(const std::string& text) {
    return parse_rational(text);
}
template <>
inline double scalar_from_string<double>(const std::string& text) {
    return std::stod(text);
}

}  // namespace minbrain

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    using Real = mpq_class;
    using NonInteger = mpq_class;
    using Nested = mpq_class;
    using Literal = long;

    static inline Real epsilon() { return {}; }
    static inline Real dummy_precision() { return {}; }
    static inline int digits10() { return 0; }

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100,
    };
};

}  // namespace Eigen
