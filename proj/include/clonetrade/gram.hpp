#pragma once

#include "clonetrade/bitstrings.hpp"

#include "json.hpp"

#include <vector>

namespace clonetrade {

// 1 / binom(M + d - 1 - x.z + |xbar & zbar & y|, d - 1)
template <typename Scalar>
Matrix<Scalar> build_G_y(int M, int N, int d, const BitString &y);

// Sum of build_G_y over weight-L strings x with x.y = min(L, w_y).
template <typename Scalar>
Matrix<Scalar> build_G_ML(int M, int N, int d, int L, const BitString &y);

template <typename Scalar>
Matrix<Scalar> g0_inverse(int M, int N, int d);

struct SpectrumLevel {
    int k = 0;
    Rational value;
    Integer degeneracy;
};

struct SpectrumReport {
    std::vector<SpectrumLevel> levels;

    Integer total_degeneracy() const;
    Rational weighted_trace() const;
};

SpectrumReport g0_spectrum(int M, int N, int d);

// f_k = 1/binom(M + d - 1 - k, d - 1), k = 0..M: the G_0 entry at overlap k.
std::vector<Rational> g0_overlap_values(int M, int d);

// Lifts the spectrum of G^(M) to G^(M+1) given the overlap values of both.
// Throws std::domain_error("recursion hypothesis violated") when lambda~ varies with k.
SpectrumReport eig_lift(const SpectrumReport &spectrum, int M, int N, const std::vector<Rational> &f_M,
                        const std::vector<Rational> &f_M1);

Rational lift_ratio(int M, int N, int k, const std::vector<Rational> &f_M, const std::vector<Rational> &f_M1);

Rational row_sum_symmetric(int M, int L, int N, int d);

struct NumericLevel {
    double value = 0;
    int degeneracy = 0;
};

// Dense symmetric eigendecomposition, eigenvalues grouped with relative tolerance.
std::vector<NumericLevel> numeric_spectrum(const Eigen::MatrixXd &A, double rel_tol = 1e-8);

nlohmann::json gram_to_json(int M, int N, int d, const BitString &y, int L, const MatrixQ &G);

}  // namespace clonetrade
