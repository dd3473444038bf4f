#include "clonetrade/tradeoff.hpp"

#include "clonetrade/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace clonetrade {

namespace {

std::size_t site_index(int N, int n) { return canonical_index(BitString::from_sites(N, {n})); }

// Reorders an M=1 Gram matrix so that row n-1 belongs to site n.
template <typename Scalar>
Matrix<Scalar> to_site_order(const Matrix<Scalar> &G, int N) {
    Matrix<Scalar> S(N, N);
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) S(a - 1, b - 1) = G(site_index(N, a), site_index(N, b));
    return S;
}

Eigen::VectorXd map_to_vector(const BetaMap &beta, int M, int N) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(to_double(binom_q(N, M)));
    for (const auto &[x, b] : beta) {
        if (x.length() != N || x.weight() != M) throw std::invalid_argument("beta key has wrong length or weight");
        v(canonical_index(x)) = b;
    }
    return v;
}

double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

void CloneProblem::validate() const {
    if (M < 1 || M >= N) throw std::invalid_argument("need 1 <= M < N");
    if (d < 2) throw std::invalid_argument("need d >= 2");
    if (N > 62) throw std::invalid_argument("N too large");
    if (Lambda.empty() && (L < 1 || L > N)) throw std::invalid_argument("need 1 <= L <= N");
    for (const auto &y : Lambda)
        if (y.length() != N) throw std::invalid_argument("Lambda member has wrong length");
}

std::vector<BitString> CloneProblem::lambda() const {
    return Lambda.empty() ? enumerate_weight(N, L) : Lambda;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return "Feasible";
        case Verdict::Infeasible: return "Infeasible";
        case Verdict::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

Rational symmetric_fidelity(int M, int L, int N, int d) {
    CloneProblem{M, L, N, d, {}}.validate();
    return binom_q(M + d - 1, M) / (binom_q(N, L) * binom_q(N + d - 1, M)) * row_sum_symmetric(M, L, N, d);
}

Rational symmetric_fidelity_sum(int M, int L, int N, int d) {
    CloneProblem{M, L, N, d, {}}.validate();
    Integer total = 0;
    for (int i = 0; i <= M; ++i)
        for (int q = 0; q <= N; ++q)
            total += binom(M, i) * binom(q - M, i) * binom(N - M + d - 1, N - q) * binom(M + i, q - L);
    return Rational(total) / (binom_q(N, L) * binom_q(N + d - 1, N - M));
}

Rational wang_formula(int M, int L, int N, int d) {
    CloneProblem{M, L, N, d, {}}.validate();
    Integer total = 0;
    for (int q = 0; q <= N; ++q) total += binom(q, M) * binom(q, L) * binom(N - q + d - 2, d - 2);
    return Rational(total) / (binom_q(N, L) * binom_q(N + d - 1, N - M));
}

SumTestReport necessary_sum_test(const CloneProblem &problem, const FidelityVector &targets) {
    problem.validate();
    SumTestReport rep;
    for (const auto &[y, f] : targets) {
        if (y.length() != problem.N || y.weight() != problem.L)
            throw std::invalid_argument("sum test needs weight-L targets");
        rep.total += f;
    }
    Rational fs = symmetric_fidelity(problem.M, problem.L, problem.N, problem.d);
    rep.bound = binom_q(problem.N, problem.L) * fs;
    rep.bound_printed = binom_q(problem.N, problem.M) * fs;
    rep.passes = rep.total <= to_double(rep.bound) + 1e-12;
    rep.passes_printed = rep.total <= to_double(rep.bound_printed) + 1e-12;
    return rep;
}

double quadratic_fidelity(const BetaMap &beta, int M, int N, int d, const BitString &y) {
    Eigen::VectorXd v = map_to_vector(beta, M, N);
    return v.dot(build_G_y<double>(M, N, d, y) * v);
}

double quadratic_norm(const BetaMap &beta, int M, int N, int d) {
    return quadratic_fidelity(beta, M, N, d, BitString::zeros(N));
}

double nminus1_objective(const Eigen::VectorXd &F, int d) {
    double s = 0;
    for (Eigen::Index i = 0; i < F.size(); ++i) s += safe_sqrt(1 - F(i));
    return F.sum() - s * s / (d - 1);
}

TradeoffResult solve_Nminus1(int N, int d, const FidelityVector &targets) {
    if (targets.empty()) throw std::invalid_argument("empty Lambda");
    if (d < 2 || N < 2) throw std::invalid_argument("need N >= 2, d >= 2");
    for (const auto &[y, t] : targets)
        if (y.length() != N) throw std::invalid_argument("target string has wrong length");

    LinearConstraints c(N);
    c.lower = Eigen::VectorXd::Zero(N);
    c.upper = Eigen::VectorXd::Ones(N);
    Eigen::VectorXd start = Eigen::VectorXd::Zero(N);
    for (const auto &[y, t] : targets) {
        Eigen::VectorXd a(N);
        for (int n = 1; n <= N; ++n) a(n - 1) = y.at(n) ? 1.0 : 0.0;
        c.add_inequality(a, t + y.weight() - 1);
        for (int n = 1; n <= N; ++n)
            if (y.at(n)) start(n - 1) = std::max(start(n - 1), t);
    }

    const double floor = 1e-24;
    Objective f;
    f.value = [d](const Eigen::VectorXd &F) { return nminus1_objective(F, d); };
    f.gradient = [d, floor](const Eigen::VectorXd &F) {
        double s = 0;
        for (Eigen::Index i = 0; i < F.size(); ++i) s += safe_sqrt(1 - F(i));
        Eigen::VectorXd g(F.size());
        for (Eigen::Index k = 0; k < F.size(); ++k) g(k) = 1 + s / (d - 1) / std::sqrt(std::max(1 - F(k), floor));
        return g;
    };
    f.hessian = [d, floor](const Eigen::VectorXd &F) {
        const Eigen::Index n = F.size();
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) r(i) = std::sqrt(std::max(1 - F(i), floor));
        double s = r.sum();
        Eigen::MatrixXd H = -0.5 * (r.cwiseInverse() * r.cwiseInverse().transpose());
        for (Eigen::Index k = 0; k < n; ++k) H(k, k) += 0.5 * s / (r(k) * r(k) * r(k));
        return Eigen::MatrixXd(H / (d - 1));
    };

    TradeoffResult res;
    auto opt = convex_minimize(f, c, start);
    res.residuals["bound"] = N - 1;
    if (opt.status == SolveStatus::Infeasible) {
        res.verdict = Verdict::Infeasible;
        res.note = "constraint set is empty";
        return res;
    }
    res.residuals["optimum"] = opt.optimum;
    res.residuals["projected_gradient"] = opt.projected_gradient;
    if (opt.optimum > N - 1 + 1e-9) {
        res.verdict = opt.status == SolveStatus::Optimal ? Verdict::Infeasible : Verdict::Undetermined;
        res.note = opt.status == SolveStatus::Optimal ? "optimum exceeds N-1" : "solver did not converge";
        return res;
    }

    // Raise the optimiser onto the boundary f = N-1.
    Eigen::VectorXd Fs = opt.argument;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
    double lo = 0, hi = 1;
    if (nminus1_objective(Fs, d) < N - 1) {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (nminus1_objective(Fs + mid * (ones - Fs), d) < N - 1) lo = mid;
            else hi = mid;
        }
        Fs = Fs + lo * (ones - Fs);
    }

    BetaMap beta;
    for (int k = 1; k <= N; ++k) {
        beta[complement(BitString::from_sites(N, {k}))] = std::sqrt(std::max(0.0, d * (1 - Fs(k - 1)) / (d - 1)));
    }
    FidelityVector achieved;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto &[y, t] : targets) {
        achieved[y] = quadratic_fidelity(beta, N - 1, N, d, y);
        margin = std::min(margin, achieved[y] - t);
    }
    double norm = quadratic_norm(beta, N - 1, N, d);
    res.residuals["norm"] = norm;
    res.residuals["min_margin"] = margin;
    res.witness_beta = beta;
    res.achieved = achieved;
    if (margin >= -1e-9 && std::abs(norm - 1) <= 1e-9) {
        res.verdict = Verdict::Feasible;
    } else {
        res.verdict = Verdict::Undetermined;
        res.note = "witness does not reach the targets";
    }
    return res;
}

double tradeoff_residual(int d, const std::vector<double> &F) {
    const double D = static_cast<double>(F.size()) + d - 1;
    double sum = 0, roots = 0;
    for (double f : F) {
        sum += f;
        roots += safe_sqrt(f * (d + 1) - 1);
    }
    return (d + 1) * sum / D - 1 - (roots / D) * (roots / D);
}

double tradeoff_1_to_N(int N, int d, const std::vector<double> &known) {
    if (N < 2 || d < 2) throw std::invalid_argument("need N >= 2, d >= 2");
    if (static_cast<int>(known.size()) != N - 1) throw std::invalid_argument("need N-1 known fidelities");
    std::vector<double> r;
    double s = 0, T = 0;
    for (double f : known) {
        if (f < 1.0 / (d + 1) - 1e-12 || f > 1 + 1e-12) throw std::invalid_argument("fidelity outside [1/(d+1), 1]");
        r.push_back(std::max(0.0, f * (d + 1) - 1));
        s += std::sqrt(r.back());
        T += f;
    }
    double s2 = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        s2 += r[i];
        for (std::size_t j = i + 1; j < r.size(); ++j) s2 += 2 * std::sqrt(r[i] * r[j]);
    }
    const double D = N + d - 1, A = D - 1;
    // quarter discriminant, D (s^2 - (D-1)(1 + (d+1)T - D))
    double q = D * (s2 - A * (1 + (d + 1) * T - D));
    if (q < -1e-12 * std::max(1.0, D * s2)) throw std::domain_error("targets outside achievable region");
    double u = (s + std::sqrt(std::max(0.0, q))) / A;
    if (u < -1e-12) throw std::domain_error("targets outside achievable region");
    double FN = (u * u + 1) / (d + 1);
    if (FN > 1 + 1e-12) throw std::domain_error("targets outside achievable region");
    return std::min(FN, 1.0);
}

Rank1Reduction rank1_reduction(int N, int d, int L) {
    if (L == N) throw std::invalid_argument("global fidelity has no rank-1 reduction here (solved case)");
    if (N < 2 || d < 2 || L < 1 || L > N) throw std::invalid_argument("need N >= 2, d >= 2, 1 <= L <= N-1");
    Rank1Reduction red;
    red.N = N;
    red.d = d;
    red.L = L;

    const BitString zero = BitString::zeros(N), y1 = BitString::from_sites(N, {1});
    MatrixQ G1q = to_site_order<Rational>(build_G_ML<Rational>(1, N, d, L, y1), N);
    MatrixQ G0Lq = to_site_order<Rational>(build_G_ML<Rational>(1, N, d, L, zero), N);
    Eigen::MatrixXd G0 = to_site_order<double>(build_G_y<double>(1, N, d, zero), N);
    Eigen::MatrixXd G1 = to_site_order<double>(build_G_ML<double>(1, N, d, L, y1), N);
    Eigen::MatrixXd G0L = to_site_order<double>(build_G_ML<double>(1, N, d, L, zero), N);

    auto B = [](long n, long k) { return binom_q(n, k); };
    if (N >= 3) {
        Rational a2 = B(N - 1, L - 1) / (N - 1) * (Rational(L - 1) / B(d + L - 2, d - 1) + Rational(N - L) / B(d + L - 1, d - 1));
        Rational a3 = B(N - 1, L - 1) / B(N - 1, 2) *
                      (B(L - 1, 2) / B(d + L - 2, d - 1) + Rational((L - 1) * (N - L)) / B(d + L - 1, d - 1) +
                       B(N - L, 2) / B(d + L, d - 1));
        Rational a0 = a2 - a3;
        Rational a1 = B(N - 1, L - 1) / B(d + L - 2, d - 1) - a0;
        Rational a4 = B(N, L) / B(N, 2) *
                      (B(L, 2) / B(d + L - 2, d - 1) + Rational(L * (N - L)) / B(d + L - 1, d - 1) +
                       B(N - L, 2) / B(d + L, d - 1));
        Rational a5 = B(N, L) / N * (Rational(L) / B(d + L - 2, d - 1) + Rational(N - L) / B(d + L - 1, d - 1)) - a4;
        red.a = {a0, a1, a2, a3, a4, a5};
        Rational m0 = G1q(1, 1) - G1q(1, 2);
        Rational m4 = G0Lq(0, 1);
        red.a_measured = {m0, G1q(0, 0) - m0, G1q(0, 1), G1q(1, 2), m4, G0Lq(0, 0) - m4};
    }

    double g0 = 0, g1 = 1, g2 = 0;
    if (N >= 3) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        v(1) = 1 / std::sqrt(2.0);
        v(2) = -1 / std::sqrt(2.0);
        const double a0 = v.dot(G1 * v), a5 = v.dot(G0L * v), c0 = v.dot(G0 * v);
        Eigen::VectorXd e1 = Eigen::VectorXd::Unit(N, 0);
        Eigen::VectorXd j = Eigen::VectorXd::Ones(N);
        j(0) = 0;
        j /= std::sqrt(N - 1.0);
        auto block_det = [&](double t) {
            Eigen::MatrixXd A = (-(a0 + t * a5) / c0) * G0 + G1 + t * G0L;
            return e1.dot(A * e1) * j.dot(A * j) - e1.dot(A * j) * j.dot(A * e1);
        };
        double t0 = 0, t1 = 1, f0 = block_det(t0), f1 = block_det(t1);
        for (int it = 0; it < 60 && f1 != 0; ++it) {
            if (f1 == f0) throw std::domain_error("degenerate reduction");
            double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
            t0 = t1;
            f0 = f1;
            t1 = t2;
            f1 = block_det(t1);
            if (std::abs(t1 - t0) <= 1e-15 * std::max(1.0, std::abs(t1))) break;
        }
        g2 = t1;
        g0 = -(a0 + g2 * a5) / c0;
    } else {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(G1, G0);
        g0 = -ges.eigenvalues()(0);
    }
    Eigen::MatrixXd A = g0 * G0 + g1 * G1 + g2 * G0L;
    const double tr = A.trace();
    A /= tr;
    red.g0 = g0 / tr;
    red.g1 = g1 / tr;
    red.g2 = g2 / tr;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
    red.singular_ratio = ev.size() > 1 ? ev(1) / ev(0) : 0.0;
    red.Gamma = es.eigenvectors().col(N - 1);
    if (red.Gamma.sum() < 0) red.Gamma = -red.Gamma;
    red.gamma1 = red.Gamma(0);
    red.gamma2 = red.Gamma(1);
    if (std::abs(red.gamma1 - red.gamma2) < 1e-12) throw std::domain_error("degenerate reduction: gamma1 == gamma2");
    return red;
}

Eigen::MatrixXd rank1_combination(const Rank1Reduction &red, int site) {
    const int N = red.N;
    const BitString zero = BitString::zeros(N);
    return red.g0 * to_site_order<double>(build_G_y<double>(1, N, red.d, zero), N) +
           red.g1 * to_site_order<double>(build_G_ML<double>(1, N, red.d, red.L, BitString::from_sites(N, {site})), N) +
           red.g2 * to_site_order<double>(build_G_ML<double>(1, N, red.d, red.L, zero), N);
}

BetaRecovery beta_from_site_sums(const Rank1Reduction &red, const Eigen::VectorXd &S, double q,
                                 const std::vector<int> &signs) {
    const int N = red.N;
    BetaRecovery out;
    const double K = (N - 1) * red.gamma2 + red.gamma1;
    if (std::abs(K) < 1e-12) throw std::domain_error("degenerate reduction");
    Eigen::VectorXd r(N);
    out.min_radicand = std::numeric_limits<double>::infinity();
    out.ok = true;
    for (int n = 0; n < N; ++n) {
        double Q = red.g0 + red.g1 * S(n) + red.g2 * q;
        out.min_radicand = std::min(out.min_radicand, Q);
        if (Q < -1e-12) {
            out.ok = false;
            out.reason = "negative radicand";
        }
        r(n) = safe_sqrt(Q) * (signs.empty() ? 1 : signs[n]);
    }
    const double total = r.sum() / K;
    out.beta = (r.array() - red.gamma2 * total) / (red.gamma1 - red.gamma2);
    return out;
}

BetaRecovery beta_from_fidelities(const Rank1Reduction &red, const FidelityVector &targets) {
    const int N = red.N;
    Eigen::VectorXd S = Eigen::VectorXd::Zero(N);
    double q = 0;
    for (const auto &[y, f] : targets) {
        if (y.length() != N || y.weight() != red.L) throw std::invalid_argument("targets must be weight-L strings");
        q += f;
        for (int n = 1; n <= N; ++n)
            if (y.at(n)) S(n - 1) += f;
    }
    return beta_from_site_sums(red, S, q);
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(MatrixQ &A) {
    std::vector<int> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < A.cols() && row < A.rows(); ++col) {
        Eigen::Index p = row;
        while (p < A.rows() && A(p, col) == 0) ++p;
        if (p == A.rows()) continue;
        if (p != row) A.row(p).swap(A.row(row));
        Rational inv = 1 / A(row, col);
        for (Eigen::Index j = col; j < A.cols(); ++j) A(row, j) *= inv;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (i == row || A(i, col) == 0) continue;
            Rational f = A(i, col);
            for (Eigen::Index j = col; j < A.cols(); ++j) A(i, j) -= f * A(row, j);
        }
        pivots.push_back(static_cast<int>(col));
        ++row;
    }
    return pivots;
}

}  // namespace

long exact_rank(const MatrixQ &A) {
    MatrixQ R = A;
    return static_cast<long>(rref(R).size());
}

std::vector<VectorQ> exact_kernel(const MatrixQ &A) {
    MatrixQ R = A;
    auto pivots = rref(R);
    std::vector<bool> is_pivot(A.cols(), false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<VectorQ> basis;
    for (Eigen::Index f = 0; f < A.cols(); ++f) {
        if (is_pivot[f]) continue;
        VectorQ v = VectorQ::Zero(A.cols());
        v(f) = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v(pivots[r]) = -R(r, f);
        basis.push_back(v);
    }
    return basis;
}

ConsistencyMatrix kernel_X(int M, int L, int N) {
    if (M < 1 || N < 1 || L < 0 || L > N || 2 * M > N) throw std::invalid_argument("invalid (M, L, N)");
    ConsistencyMatrix cm;
    cm.M = M;
    cm.L = L;
    cm.N = N;
    auto rows = enumerate_weight(N, 2 * M);
    auto cols = enumerate_weight(N, L);
    cm.X = MatrixQ::Zero(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (dot(rows[i], cols[j]) == 2 * M) cm.X(i, j) = 1;
    cm.rank = exact_rank(cm.X);
    bool ok = M == 1 ? (1 < L && L < N - 1) : (2 * M < L && L < N - 2 * M);
    if (!ok) {
        cm.guarded = true;
        cm.flag = M == 1 ? "kernel conditions need 1 < L < N-1" : "kernel conditions need 2M < L < N-2M";
        return cm;
    }
    cm.kernel = exact_kernel(cm.X);
    return cm;
}

bool kernel_annihilates(const ConsistencyMatrix &cm, int d) {
    auto cols = enumerate_weight(cm.N, cm.L);
    std::vector<MatrixQ> G;
    for (const auto &y : cols) G.push_back(build_G_y<Rational>(cm.M, cm.N, d, y));
    for (const auto &v : cm.kernel) {
        MatrixQ S = MatrixQ::Zero(G[0].rows(), G[0].cols());
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (v(j) != 0) S += v(j) * G[j];
        for (Eigen::Index i = 0; i < S.rows(); ++i)
            for (Eigen::Index j = 0; j < S.cols(); ++j)
                if (S(i, j) != 0) return false;
    }
    return true;
}

double cons2_rhs(const Eigen::VectorXd &beta, int d, int L, int a, int b, int c, int dd) {
    const int N = static_cast<int>(beta.size());
    return to_double(binom_q(N - 4, L - 2)) * 2.0 * (d - 1) * (beta(a - 1) - beta(dd - 1)) * (beta(b - 1) - beta(c - 1)) /
           ((d + L) * to_double(binom_q(d + L - 1, d)));
}

double residual_quadratics(const Eigen::VectorXd &beta, int d, int L, int a, int b, int c, int dd) {
    const int N = static_cast<int>(beta.size());
    if (N < 4) throw std::invalid_argument("need N >= 4");
    std::vector<int> s{a, b, c, dd};
    for (int i = 0; i < 4; ++i) {
        if (s[i] < 1 || s[i] > N) throw std::invalid_argument("site out of range");
        for (int j = 0; j < i; ++j)
            if (s[i] == s[j]) throw std::invalid_argument("sites must be distinct");
    }
    auto G = [&](int i, int j) {
        return to_site_order<double>(build_G_ML<double>(1, N, d, L, BitString::from_sites(N, {i, j})), N);
    };
    Eigen::MatrixXd comb = G(a, b) + G(c, dd) - G(a, c) - G(b, dd);
    return beta.dot(comb * beta) - cons2_rhs(beta, d, L, a, b, c, dd);
}

namespace {

// Local maximisation of min_y (b'G_y b - t_y) over b'G0 b = 1 with a soft-min ascent.
struct MarginSearch {
    std::vector<Eigen::MatrixXd> Gh;  // whitened
    Eigen::VectorXd t;
    Eigen::MatrixXd back;  // b = back * u

    MarginSearch(const std::vector<Eigen::MatrixXd> &G, const Eigen::VectorXd &targets, const Eigen::MatrixXd &G0)
        : t(targets) {
        Eigen::LLT<Eigen::MatrixXd> llt(G0);
        Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(G0.rows(), G0.cols()));
        back = Linv.transpose();
        for (const auto &g : G) Gh.push_back(Linv * g * Linv.transpose());
    }

    Eigen::VectorXd margins(const Eigen::VectorXd &u) const {
        Eigen::VectorXd m(Gh.size());
        for (std::size_t k = 0; k < Gh.size(); ++k) m(k) = u.dot(Gh[k] * u) - t(k);
        return m;
    }

    static double softmin(const Eigen::VectorXd &m, double tau) {
        double lo = m.minCoeff();
        return lo - tau * std::log((-(m.array() - lo) / tau).exp().sum());
    }

    // Returns the best u found (unit) and its true min margin.
    std::pair<Eigen::VectorXd, double> run(Eigen::VectorXd u) const {
        u.normalize();
        Eigen::VectorXd best = u;
        double best_m = margins(u).minCoeff();
        for (double tau : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            double eta = 0.1;
            for (int it = 0; it < 400 && eta > 1e-14; ++it) {
                Eigen::VectorXd m = margins(u);
                double cur = softmin(m, tau);
                Eigen::VectorXd w = (-(m.array() - m.minCoeff()) / tau).exp();
                w /= w.sum();
                Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
                for (std::size_t k = 0; k < Gh.size(); ++k) g += 2 * w(k) * (Gh[k] * u);
                g -= g.dot(u) * u;
                if (g.norm() < 1e-15) break;
                while (eta > 1e-14) {
                    Eigen::VectorXd cand = (u + eta * g).normalized();
                    if (softmin(margins(cand), tau) > cur) {
                        u = cand;
                        eta *= 1.5;
                        break;
                    }
                    eta *= 0.5;
                }
                double mm = margins(u).minCoeff();
                if (mm > best_m) {
                    best_m = mm;
                    best = u;
                }
            }
        }
        return {best, best_m};
    }
};

}  // namespace

std::pair<Eigen::VectorXd, double> maximize_min_margin(const std::vector<Eigen::MatrixXd> &G,
                                                       const Eigen::VectorXd &targets, const Eigen::MatrixXd &G0,
                                                       const std::vector<Eigen::VectorXd> &starts, int random_starts,
                                                       unsigned seed) {
    MarginSearch ms(G, targets, G0);
    const Eigen::Index n = G0.rows();
    Eigen::MatrixXd fwd = G0.llt().matrixL().transpose();  // u = fwd * b
    std::vector<Eigen::VectorXd> us;
    for (const auto &b : starts)
        if (b.norm() > 0) us.push_back(fwd * b);
    us.push_back(Eigen::VectorXd::Ones(n));
    for (Eigen::Index i = 0; i < n; ++i) us.push_back(Eigen::VectorXd::Unit(n, i));
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    for (int r = 0; r < random_starts; ++r) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
        us.push_back(v);
    }
    Eigen::VectorXd best;
    double best_m = -std::numeric_limits<double>::infinity();
    for (const auto &u : us) {
        auto [cand, m] = ms.run(u);
        if (m > best_m) {
            best_m = m;
            best = cand;
        }
    }
    return {ms.back * best, best_m};
}

TradeoffResult feasibility_1LN(int N, int d, int L, const FidelityVector &targets) {
    if (L < 1 || L >= N) throw std::invalid_argument("feasibility_1LN needs 1 <= L <= N-1; use the closed-form solvers");
    auto ys = enumerate_weight(N, L);
    const int nY = static_cast<int>(ys.size());
    Eigen::VectorXd t = Eigen::VectorXd::Zero(nY);
    for (const auto &[y, f] : targets) {
        if (y.length() != N || y.weight() != L) throw std::invalid_argument("targets must be weight-L strings");
        t(canonical_index(y)) = f;
    }

    TradeoffResult res;
    CloneProblem problem{1, L, N, d, {}};
    if (!necessary_sum_test(problem, targets).passes) {
        res.verdict = Verdict::Infeasible;
        res.note = "stage 0: sum of targets exceeds binom(N,L) times the symmetric optimum";
        return res;
    }

    Rank1Reduction red = rank1_reduction(N, d, L);
    const double K = (N - 1) * red.gamma2 + red.gamma1;
    const double dg = red.gamma1 - red.gamma2;
    const double C = (dg * dg - (d - 1) * red.gamma2 * (N * red.gamma2 + 2 * dg)) / (K * K);

    Eigen::MatrixXd Inc(N, nY);
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < nY; ++j) Inc(n, j) = ys[j].at(n + 1) ? 1.0 : 0.0;
    Eigen::MatrixXd Arow = red.g1 * Inc + red.g2 * Eigen::MatrixXd::Ones(N, nY);

    auto Qvec = [&](const Eigen::VectorXd &F) -> Eigen::VectorXd { return (Arow * F).array() + red.g0; };
    auto phi = [&](const Eigen::VectorXd &F) {
        Eigen::VectorXd Q = Qvec(F);
        double s = 0;
        for (int n = 0; n < N; ++n) s += safe_sqrt(Q(n));
        return (d - 1) * Q.sum() + C * s * s - d * dg * dg;
    };

    const double floor = 1e-14;
    Objective obj;
    obj.value = phi;
    obj.gradient = [&](const Eigen::VectorXd &F) {
        Eigen::VectorXd Q = Qvec(F);
        double s = 0;
        Eigen::VectorXd ds = Eigen::VectorXd::Zero(nY);
        for (int n = 0; n < N; ++n) {
            s += safe_sqrt(Q(n));
            ds += Arow.row(n).transpose() / (2 * std::sqrt(std::max(Q(n), floor)));
        }
        Eigen::VectorXd g = (d - 1) * Arow.colwise().sum().transpose() + 2 * C * s * ds;
        return g;
    };
    obj.hessian = [&](const Eigen::VectorXd &F) {
        Eigen::VectorXd Q = Qvec(F);
        double s = 0;
        Eigen::VectorXd ds = Eigen::VectorXd::Zero(nY);
        Eigen::MatrixXd dds = Eigen::MatrixXd::Zero(nY, nY);
        for (int n = 0; n < N; ++n) {
            double q = std::max(Q(n), floor);
            s += safe_sqrt(Q(n));
            ds += Arow.row(n).transpose() / (2 * std::sqrt(q));
            dds -= Arow.row(n).transpose() * Arow.row(n) / (4 * q * std::sqrt(q));
        }
        return Eigen::MatrixXd(2 * C * (ds * ds.transpose() + s * dds));
    };

    LinearConstraints c(nY);
    c.lower = t.cwiseMax(0.0);
    c.upper = Eigen::VectorXd::Ones(nY);
    auto cm = kernel_X(1, L, N);
    bool lift_ok = true;
    for (const auto &v : cm.kernel) {
        Eigen::VectorXd vd(nY);
        for (int j = 0; j < nY; ++j) vd(j) = to_double(v(j));
        c.add_equality(vd, 0.0);
        if (std::abs(vd.sum()) > 1e-12) lift_ok = false;
    }
    for (int n = 0; n < N; ++n) c.add_inequality(Arow.row(n).transpose(), -red.g0);

    res.residuals["kernel_conditions"] = static_cast<double>(cm.kernel.size());
    res.residuals["rank1_singular_ratio"] = red.singular_ratio;
    auto opt = convex_minimize(obj, c, t);
    if (opt.status == SolveStatus::Infeasible) {
        res.verdict = Verdict::Infeasible;
        res.note = "stage 1: linear constraints are inconsistent";
        return res;
    }
    res.residuals["phi_min"] = opt.optimum;
    if (opt.optimum > 1e-9) {
        res.verdict = opt.status == SolveStatus::Optimal ? Verdict::Infeasible : Verdict::Undetermined;
        res.note = opt.status == SolveStatus::Optimal ? "stage 1: normalisation cannot be met"
                                                      : "stage 1: solver did not converge";
        return res;
    }

    // stage 2
    Eigen::VectorXd F = opt.argument;
    if (lift_ok && phi(F) < 0) {
        double hi = 1 - F.maxCoeff();
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(nY);
        if (phi(F + hi * ones) <= 0) {
            F += hi * ones;
        } else {
            double lo = 0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (phi(F + mid * ones) < 0) lo = mid;
                else hi = mid;
            }
            F += lo * ones;
        }
    }
    Eigen::VectorXd S = Inc * F;
    const double q = F.sum();

    const BitString zero = BitString::zeros(N);
    Eigen::MatrixXd G0 = to_site_order<double>(build_G_y<double>(1, N, d, zero), N);
    std::vector<Eigen::MatrixXd> Gy;
    for (const auto &y : ys) Gy.push_back(to_site_order<double>(build_G_y<double>(1, N, d, y), N));

    auto evaluate = [&](const Eigen::VectorXd &beta, Eigen::VectorXd &Fa) {
        Fa.resize(nY);
        for (int j = 0; j < nY; ++j) Fa(j) = beta.dot(Gy[j] * beta);
        return (Fa - t).minCoeff();
    };

    Eigen::VectorXd best_beta;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (long mask = 0; mask < (1L << N); ++mask) {
        std::vector<int> signs(N);
        for (int n = 0; n < N; ++n) signs[n] = (mask >> n) & 1 ? -1 : 1;
        auto rec = beta_from_site_sums(red, S, q, signs);
        double nrm = rec.beta.dot(G0 * rec.beta);
        if (!(nrm > 0)) continue;
        Eigen::VectorXd beta = rec.beta / std::sqrt(nrm);
        Eigen::VectorXd Fa;
        double m = evaluate(beta, Fa);
        if (m > best_margin) {
            best_margin = m;
            best_beta = beta;
        }
    }

    auto finish_feasible = [&](const Eigen::VectorXd &beta, const std::string &note) {
        Eigen::VectorXd Fa;
        double m = evaluate(beta, Fa);
        res.verdict = Verdict::Feasible;
        res.witness_beta = site_beta_map(beta);
        FidelityVector ach;
        for (int j = 0; j < nY; ++j) ach[ys[j]] = Fa(j);
        res.achieved = ach;
        res.residuals["min_margin"] = m;
        res.residuals["norm"] = beta.dot(G0 * beta);
        res.note = note;
        return res;
    };

    if (best_margin >= -1e-9) return finish_feasible(best_beta, "stage 2: recovered beta reaches every target");

    // stage 3: cons2 residuals of the stage-1 point
    res.residuals["stage2_margin"] = best_margin;
    if (N >= 4 && L >= 2) {
        auto pair_sum = [&](int i, int j) {
            double s = 0;
            for (int k = 0; k < nY; ++k)
                if (ys[k].at(i) && ys[k].at(j)) s += F(k);
            return s;
        };
        double worst = 0;
        for (int a = 1; a <= N; ++a)
            for (int b = a + 1; b <= N; ++b)
                for (int cc = b + 1; cc <= N; ++cc)
                    for (int dd = cc + 1; dd <= N; ++dd) {
                        double lhs = pair_sum(a, b) + pair_sum(cc, dd) - pair_sum(a, cc) - pair_sum(b, dd);
                        worst = std::max(worst, std::abs(lhs - cons2_rhs(best_beta, d, L, a, b, cc, dd)));
                    }
        res.residuals["cons2_max"] = worst;
    }

    // local refiner: reports witnesses only
    auto [rb, rm] = maximize_min_margin(Gy, t, G0, {best_beta}, 8, 12345u);
    res.residuals["refiner_margin"] = rm;
    if (rm >= -1e-9) return finish_feasible(rb, "local refiner witness");
    res.verdict = Verdict::Undetermined;
    res.note = "stage 3: consistency conditions unresolved";
    return res;
}

std::string to_string(Rank1Class c) {
    switch (c) {
        case Rank1Class::Exists: return "Exists";
        case Rank1Class::Excluded: return "Excluded";
        case Rank1Class::Unknown: return "Unknown";
    }
    return "Unknown";
}

Rank1Class rank1_classification(int M, int L, int N) {
    (void)L;
    if (M == 1 || N == M + 1) return Rank1Class::Exists;
    if (N > M + 1 && (N <= 2 * M || M % 2 == 0)) return Rank1Class::Excluded;
    return Rank1Class::Unknown;
}

double success_probability(const BetaMap &beta, int M, int N, int d) {
    (void)d;
    double s = 0;
    for (const auto &[x, b] : beta) {
        if (x.length() != N || x.weight() != M) throw std::invalid_argument("beta key has wrong length or weight");
        s += b * b;
    }
    if (s <= 0) throw std::invalid_argument("beta is zero");
    return 1.0 / (std::pow(static_cast<double>(N), M) * s);
}

BetaMap site_beta_map(const Eigen::VectorXd &beta) {
    const int N = static_cast<int>(beta.size());
    BetaMap m;
    for (int n = 1; n <= N; ++n) m[BitString::from_sites(N, {n})] = beta(n - 1);
    return m;
}

double oracle_confirmation(const TradeoffResult &res, int M, int N, int d) {
    if (!res.witness_beta || !res.achieved) throw std::invalid_argument("no witness to confirm");
    auto chi = build_chi(M, N, d, *res.witness_beta, ghz_state(N - M, d));
    double worst = 0;
    for (const auto &[y, f] : *res.achieved) worst = std::max(worst, std::abs(fidelity_direct(chi, M, N, d, y) - f));
    return worst;
}

}  // namespace clonetrade
