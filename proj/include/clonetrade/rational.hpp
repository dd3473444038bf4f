#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>

#include <string>

namespace clonetrade {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixQ = Matrix<Rational>;
using VectorQ = Vector<Rational>;

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational &r);

double to_double(const Rational &r);

// Accepts "p/q", integers, and decimal/scientific notation ("0.8", "1e-3").
// Decimals are converted exactly (0.1 -> 1/10).
Rational parse_rational(const std::string &text);

// Shortest round-trip decimal text of a double, parsed exactly.
Rational rational_from_double(double x);

// 15 significant digits, fixed formatting used by every printed float.
std::string format_double(double x);

template <typename Scalar>
Scalar from_rational(const Rational &r);

template <>
inline Rational from_rational<Rational>(const Rational &r) {
    return r;
}

template <>
inline double from_rational<double>(const Rational &r) {
    return to_double(r);
}

}  // namespace clonetrade
