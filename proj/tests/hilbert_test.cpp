#include "clonetrade/gram.hpp"
#include "clonetrade/hilbert.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>

using namespace clonetrade;

namespace {

int numeric_rank(const Eigen::MatrixXcd &A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    int r = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r += es.eigenvalues()(i) > 1e-9;
    return r;
}

std::map<BitString, double> uniform(int N, int L) {
    std::map<BitString, double> a;
    auto ys = enumerate_weight(N, L);
    for (const auto &y : ys) a[y] = 1.0 / ys.size();
    return a;
}

}  // namespace

TEST(SymProjector, Ranks) {
    EXPECT_EQ(numeric_rank(sym_projector(2, 2).data), 3);
    EXPECT_EQ(numeric_rank(sym_projector(3, 2).data), 4);
    EXPECT_LT((sym_projector(1, 3).data - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SymProjector, IdempotentNonNegativeTrace) {
    for (int d = 2; d <= 3; ++d)
        for (int n = 1; n <= (d == 2 ? 6 : 4); ++n) {
            auto P = sym_projector(n, d).data;
            EXPECT_LT((P * P - P).cwiseAbs().maxCoeff(), 1e-11);
            EXPECT_GT(P.real().minCoeff(), -1e-14);
            EXPECT_LT(P.imag().cwiseAbs().maxCoeff(), 1e-15);
            EXPECT_EQ(std::lround(P.trace().real()), binom(n + d - 1, n).convert_to<long>());
        }
}

TEST(SymBasis, Examples) {
    auto b = sym_basis(2, 2);
    ASSERT_EQ(b.vectors.size(), 3u);
    EXPECT_NEAR(b.vectors[1](1), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(b.vectors[1](2), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(sym_basis(1, 3).vectors.size(), 3u);
    auto c = sym_basis(3, 2);
    ASSERT_EQ(c.vectors.size(), 4u);
    for (std::size_t i = 0; i < c.vectors.size(); ++i)
        for (std::size_t j = 0; j < c.vectors.size(); ++j) EXPECT_NEAR(c.vectors[i].dot(c.vectors[j]), i == j, 1e-14);
}

TEST(Spin, CasimirOnQubitSymmetricSubspace) {
    const int N = 3;
    auto J = total_spin(N, 2);
    auto P = sym_projector(N, 2).data;
    // 2S normalisation, maximal spin 3/2
    EXPECT_LT((J.J2 * P - 4 * 1.5 * 2.5 * P).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spin, CommutesWithSymmetricProjector) {
    for (int d = 2; d <= 3; ++d) {
        auto J = total_spin(3, d);
        auto P = sym_projector(3, d).data;
        EXPECT_LT((J.J2 * P - P * J.J2).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((J.JZ * P - P * J.JZ).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(TransposeTrick, MaximallyEntangledIdentity) {
    std::mt19937 rng(6);
    std::normal_distribution<double> g;
    for (int d = 2; d <= 3; ++d) {
        Eigen::VectorXcd B = Eigen::VectorXcd::Zero(d * d);
        for (int i = 0; i < d; ++i) B(i * d + i) = 1;
        for (int k = 0; k < 20; ++k) {
            Eigen::MatrixXcd A(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(i, j) = cplx(g(rng), g(rng));
            Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
            Eigen::MatrixXcd lhs = Eigen::kroneckerProduct(A.transpose(), I);
            Eigen::MatrixXcd rhs = Eigen::kroneckerProduct(I, A);
            EXPECT_LT((lhs * B - rhs * B).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(PartialTranspose, SingleTermIsScaledProjector) {
    // R_y transposed over IN is proportional to a symmetric projector on IN plus the y-sites.
    for (int d = 2; d <= 3; ++d) {
        auto R = build_R_single(1, 2, d, BitString::parse("10"));
        auto T = partial_transpose(R, BitString::parse("100"));
        auto P = sym_projector_on(R.dims, {0, 1}).data;
        EXPECT_LT((T.data * ((d + 1) / 2.0) - P).cwiseAbs().maxCoeff(), 1e-12) << d;
    }
}

TEST(BuildR, Examples) {
    EXPECT_NEAR(max_eig(build_R(1, 2, 2, uniform(2, 1))).value, 5.0 / 6, 1e-10);
    std::map<BitString, double> first = {{BitString::parse("10"), 1.0}, {BitString::parse("01"), 0.0}};
    EXPECT_NEAR(max_eig(build_R(1, 2, 2, first)).value, 1.0, 1e-10);
    EXPECT_NEAR(max_eig(build_R(2, 3, 2, uniform(3, 1))).value, 11.0 / 12, 1e-8);
    EXPECT_NEAR(max_eig(build_R(1, 1, 2, uniform(1, 1))).value, 1.0, 1e-12);
    std::map<BitString, Rational> exact = {{BitString::parse("10"), Rational(1, 2)}, {BitString::parse("01"), Rational(1, 2)}};
    EXPECT_NEAR(max_eig(build_R(1, 2, 2, exact)).value, 5.0 / 6, 1e-10);
}

TEST(BuildR, BoundedByOne) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 10; ++k) {
        std::map<BitString, double> a;
        double s = 0;
        for (const auto &y : enumerate_weight(3, 1)) s += (a[y] = U(rng));
        double mx = 0;
        for (auto &[y, v] : a) mx = std::max(mx, v /= s);
        double lam = max_eig(build_R(1, 3, 2, a)).value;
        EXPECT_LE(lam, 1 + 1e-12);
        EXPECT_GE(lam, mx - 1e-12);
    }
}

TEST(BuildR, BudgetGuard) {
    EXPECT_THROW(build_R_single(3, 6, 3, BitString::parse("100000")), std::length_error);
}

TEST(MaxEig, DiagonalAndHermiticity) {
    DenseOperator D{{3}, Eigen::MatrixXcd::Zero(3, 3)};
    D.data.diagonal() << 1, 2, 3;
    EXPECT_NEAR(max_eig(D).value, 3, 1e-15);
    D.data(0, 1) = 1;
    EXPECT_THROW(max_eig(D), std::invalid_argument);
}

TEST(States, PsiRequiresSymmetricPhi) {
    EXPECT_THROW(build_psi_x(1, 3, 2, BitString::parse("100"), computational_state({0, 1}, 2)), std::invalid_argument);
    EXPECT_NO_THROW(build_psi_x(1, 3, 2, BitString::parse("100"), ghz_state(2, 2)));
}

TEST(States, DirectFidelityMatchesQuadraticForm) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(-1, 1);
    for (auto [M, N, d] : std::vector<std::array<int, 3>>{{1, 2, 2}, {1, 3, 2}, {2, 3, 2}, {1, 3, 3}, {2, 4, 2}}) {
        for (int k = 0; k < 3; ++k) {
            std::map<BitString, double> beta;
            for (const auto &x : enumerate_weight(N, M)) beta[x] = U(rng);
            auto chi = build_chi(M, N, d, beta, ghz_state(N - M, d));
            for (int w = 0; w <= N; ++w)
                for (const auto &y : enumerate_weight(N, w)) {
                    Eigen::MatrixXd G = build_G_y<double>(M, N, d, y);
                    Eigen::VectorXd b(beta.size());
                    for (const auto &[x, v] : beta) b(canonical_index(x)) = v;
                    EXPECT_NEAR(fidelity_direct(chi, M, N, d, y), b.dot(G * b), 1e-10);
                }
        }
    }
}

TEST(States, UniformOneToTwo) {
    std::map<BitString, double> beta = {{BitString::parse("01"), 1 / std::sqrt(3.0)}, {BitString::parse("10"), 1 / std::sqrt(3.0)}};
    auto chi = build_chi(1, 2, 2, beta, ghz_state(1, 2));
    EXPECT_NEAR(fidelity_direct(chi, 1, 2, 2, BitString::parse("10")), 5.0 / 6, 1e-12);
    EXPECT_NEAR(fidelity_direct(chi, 1, 2, 2, BitString::parse("00")), 1.0, 1e-12);
}

TEST(Identities, EtaNorm) {
    EXPECT_NEAR(eta_norm_check(1, 2, 2, BitString::parse("01"), BitString::parse("10")), 1, 1e-12);
    EXPECT_NEAR(eta_norm_check(2, 3, 2, BitString::parse("011"), BitString::parse("110")), 1, 1e-12);
    EXPECT_NEAR(eta_norm_check(2, 3, 2, BitString::parse("110"), BitString::parse("110")), 1, 1e-12);
}

TEST(Identities, Commutators) {
    EXPECT_LT(commutator_check(1, 1, 2), 1e-12);
    EXPECT_LT(commutator_check(1, 2, 2), 1e-12);
    EXPECT_LT(commutator_check(1, 1, 3), 1e-12);
    EXPECT_LT(twirl_check(2), 1e-12);
}

TEST(Identities, LiebMattis) {
    EXPECT_TRUE(lieb_mattis_check(build_R(1, 2, 2, uniform(2, 1))));
    EXPECT_TRUE(lieb_mattis_check(build_R(2, 3, 2, uniform(3, 1))));
    std::map<BitString, double> a = {{BitString::parse("100"), 0.6}, {BitString::parse("010"), 0.3}, {BitString::parse("001"), 0.1}};
    EXPECT_TRUE(lieb_mattis_check(build_R(1, 3, 2, a)));
}

TEST(Identities, PhiTrace) {
    EXPECT_TRUE(phi_trace_check(ghz_state(3, 2), 1, 2));
    EXPECT_TRUE(phi_trace_check(ghz_state(2, 3), 1, 3));
    DenseState phi{{2, 2, 2, 2}, Eigen::VectorXcd::Zero(16)};
    for (int idx : {1, 2, 4, 8}) phi.amplitudes(idx) = 1 / std::sqrt(2.0);
    phi.amplitudes(15) = 1;
    phi.amplitudes /= std::sqrt(3.0);
    EXPECT_TRUE(phi_trace_check(phi, 2, 2));
    EXPECT_FALSE(phi_trace_check(computational_state({0, 0, 0}, 2), 1, 2));
    EXPECT_THROW(phi_trace_check(computational_state({0, 1, 0}, 2), 1, 2), std::invalid_argument);
}
