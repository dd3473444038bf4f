#include "clonetrade/gram.hpp"


#include <algorithm>
#include <stdexcept>

namespace clonetrade {

namespace {

void check_dims(int M, int N, int d) {
    if (N < 1 || M < 0 || M > N) throw std::invalid_argument("require 0 <= M <= N, N >= 1");
    if (d < 2) throw std::invalid_argument("require d >= 2");
}

}  // namespace

template <typename Scalar>
Matrix<Scalar> build_G_y(int M, int N, int d, const BitString &y) {
    check_dims(M, N, d);
    if (y.length() != N) throw std::invalid_argument("label length must equal N");
    auto X = enumerate_weight(N, M);
    const long top = M + d - 1 + N;
    std::vector<Scalar> inv(top + 1);
    for (long k = 0; k <= top; ++k) {
        Integer b = binom(k, d - 1);
        inv[k] = b == 0 ? Scalar(0) : from_rational<Scalar>(Rational(Integer(1), b));
    }
    const auto n = static_cast<Eigen::Index>(X.size());
    Matrix<Scalar> G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            int xz = dot(X[i], X[j]);
            int w = weight(bit_and(complement(bit_or(X[i], X[j])), y));
            G(i, j) = inv[M + d - 1 - xz + w];
            G(j, i) = G(i, j);
        }
    }
    return G;
}

template <typename Scalar>
Matrix<Scalar> build_G_ML(int M, int N, int d, int L, const BitString &y) {
    check_dims(M, N, d);
    if (L < 0 || L > N) throw std::invalid_argument("require 0 <= L <= N");
    if (y.length() != N) throw std::invalid_argument("label length must equal N");
    const int target = std::min(L, y.weight());
    const auto n = static_cast<Eigen::Index>(binom(N, M).convert_to<long>());
    Matrix<Scalar> G = Matrix<Scalar>::Zero(n, n);
    for (const auto &x : enumerate_weight(N, L)) {
        if (dot(x, y) == target) G += build_G_y<Scalar>(M, N, d, x);
    }
    return G;
}

template <typename Scalar>
Matrix<Scalar> g0_inverse(int M, int N, int d) {
    check_dims(M, N, d);
    Rational pre = Rational((d + M - 1) * (N + d - M - 1)) / Rational((d - 1) * (d + N - 1));
    auto X = enumerate_weight(N, M);
    const auto n = static_cast<Eigen::Index>(X.size());
    Matrix<Scalar> G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            int xz = dot(X[i], X[j]);
            Rational v = pre / binom_q(d + N - 2, M - xz);
            if ((M + xz) % 2) v = -v;
            G(i, j) = from_rational<Scalar>(v);
        }
    }
    return G;
}

template Matrix<Rational> build_G_y<Rational>(int, int, int, const BitString &);
template Matrix<double> build_G_y<double>(int, int, int, const BitString &);
template Matrix<Rational> build_G_ML<Rational>(int, int, int, int, const BitString &);
template Matrix<double> build_G_ML<double>(int, int, int, int, const BitString &);
template Matrix<Rational> g0_inverse<Rational>(int, int, int);
template Matrix<double> g0_inverse<double>(int, int, int);

Integer SpectrumReport::total_degeneracy() const {
    Integer s = 0;
    for (const auto &l : levels) s += l.degeneracy;
    return s;
}

Rational SpectrumReport::weighted_trace() const {
    Rational s = 0;
    for (const auto &l : levels) s += l.value * Rational(l.degeneracy);
    return s;
}

static Integer level_degeneracy(int N, int k) { return binom(N, k) - binom(N, k - 1); }

SpectrumReport g0_spectrum(int M, int N, int d) {
    check_dims(M, N, d);
    SpectrumReport rep;
    const int top = std::min(M, N - M);
    for (int k = 0; k <= top; ++k) {
        Rational v = binom_q(d - 2 + k, k) * binom_q(N + d - 1, M) / (binom_q(M + d - 1, M) * binom_q(N + d - 1, k));
        rep.levels.push_back({k, v, level_degeneracy(N, k)});
    }
    return rep;
}

std::vector<Rational> g0_overlap_values(int M, int d) {
    std::vector<Rational> f;
    for (int k = 0; k <= M; ++k) f.push_back(Rational(Integer(1), binom(M + d - 1 - k, d - 1)));
    return f;
}

Rational lift_ratio(int M, int N, int k, const std::vector<Rational> &f, const std::vector<Rational> &g) {
    Rational num = Rational(M + 1 - k) * g.at(k + 1) + Rational(N - 2 * M - 1 + k) * g.at(k);
    Rational den = Rational(M + 1 - k) * f.at(k) + (k > 0 ? Rational(k) * f.at(k - 1) : Rational(0));
    if (den == 0) throw std::domain_error("lift ratio has zero denominator");
    return num / den;
}

SpectrumReport eig_lift(const SpectrumReport &spectrum, int M, int N, const std::vector<Rational> &f_M,
                        const std::vector<Rational> &f_M1) {
    if (static_cast<int>(f_M.size()) != M + 1 || static_cast<int>(f_M1.size()) != M + 2) {
        throw std::invalid_argument("overlap values must have M+1 and M+2 entries");
    }
    if (M + 1 > N) throw std::invalid_argument("cannot lift beyond M = N");
    if (spectrum.levels.empty()) throw std::invalid_argument("empty spectrum");
    Rational ratio = lift_ratio(M, N, spectrum.levels.front().k, f_M, f_M1);
    for (const auto &l : spectrum.levels) {
        if (lift_ratio(M, N, l.k, f_M, f_M1) != ratio) throw std::domain_error("recursion hypothesis violated");
    }
    SpectrumReport out;
    for (const auto &l : spectrum.levels) {
        if (l.k > N - M - 1) continue;
        out.levels.push_back({l.k, l.value * ratio, l.degeneracy});
    }
    Integer extra = binom(N, M + 1) - binom(N, M);
    if (extra > 0) {
        Rational v = (binom_q(N, M + 1) * f_M1.at(M + 1) - ratio * binom_q(N, M) * f_M.at(M)) / Rational(extra);
        out.levels.push_back({M + 1, v, extra});
    }
    return out;
}

Rational row_sum_symmetric(int M, int L, int N, int d) {
    check_dims(M, N, d);
    Rational total = 0;
    for (int i = 0; i <= M; ++i) {
        Rational inner = 0;
        for (int q = 0; q <= N + i - 2 * M; ++q) {
            Integer b = binom(N + i - 2 * M, q) * binom(2 * M - i, L - q);
            if (b == 0) continue;
            inner += Rational(b) / binom_q(M + d - 1 - i + q, d - 1);
        }
        total += Rational(binom(M, i) * binom(N - M, M - i)) * inner;
    }
    return total;
}

std::vector<NumericLevel> numeric_spectrum(const Eigen::MatrixXd &A, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    std::vector<double> vals(ev.data(), ev.data() + ev.size());
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    double scale = vals.empty() ? 1.0 : std::max(1.0, std::abs(vals.front()));
    std::vector<NumericLevel> out;
    for (double v : vals) {
        if (!out.empty() && std::abs(out.back().value - v) <= rel_tol * scale) {
            ++out.back().degeneracy;
        } else {
            out.push_back({v, 1});
        }
    }
    return out;
}

nlohmann::json gram_to_json(int M, int N, int d, const BitString &y, int L, const MatrixQ &G) {
    nlohmann::json j;
    j["M"] = M;
    j["N"] = N;
    j["d"] = d;
    j["y"] = y.str();
    if (L >= 0) j["L"] = L;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < G.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < G.cols(); ++c) row.push_back(to_string(G(r, c)));
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

}  // namespace clonetrade
