#include "clonetrade/gram.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace clonetrade;

namespace {

MatrixQ mq(std::initializer_list<std::initializer_list<Rational>> rows) {
    MatrixQ A(rows.size(), rows.begin()->size());
    int i = 0;
    for (const auto &r : rows) {
        int j = 0;
        for (const auto &v : r) A(i, j++) = v;
        ++i;
    }
    return A;
}

bool same(const MatrixQ &A, const MatrixQ &B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (A(i, j) != B(i, j)) return false;
    return true;
}

const Rational half(1, 2);

}  // namespace

TEST(BuildG, SingleSiteExamples) {
    EXPECT_TRUE(same(build_G_y<Rational>(1, 2, 2, BitString::parse("00")), mq({{1, half}, {half, 1}})));
    // rows (01, 10)
    EXPECT_TRUE(same(build_G_y<Rational>(1, 2, 2, BitString::parse("10")), mq({{half, half}, {half, 1}})));
    EXPECT_TRUE(same(build_G_y<Rational>(2, 2, 3, BitString::parse("00")), mq({{1}})));
}

TEST(BuildG, ML) {
    EXPECT_TRUE(same(build_G_ML<Rational>(1, 2, 2, 1, BitString::parse("00")),
                     mq({{Rational(3, 2), 1}, {1, Rational(3, 2)}})));
    EXPECT_TRUE(same(build_G_ML<Rational>(1, 2, 2, 2, BitString::parse("00")),
                     build_G_y<Rational>(1, 2, 2, BitString::parse("11"))));
    MatrixQ s = build_G_y<Rational>(1, 3, 2, BitString::parse("110")) + build_G_y<Rational>(1, 3, 2, BitString::parse("101"));
    EXPECT_TRUE(same(build_G_ML<Rational>(1, 3, 2, 2, BitString::parse("100")), s));
}

TEST(BuildG, RejectsBadDimensions) {
    EXPECT_THROW(build_G_y<Rational>(3, 2, 2, BitString::parse("00")), std::invalid_argument);
    EXPECT_THROW(build_G_y<Rational>(1, 2, 1, BitString::parse("00")), std::invalid_argument);
    EXPECT_THROW(build_G_y<Rational>(1, 3, 2, BitString::parse("00")), std::invalid_argument);
}

TEST(BuildG, SymmetricPositiveAndPermutationInvariant) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int N = 3 + trial % 3, M = 1 + trial % 2, d = 2 + trial % 2;
        BitString y(N, rng() & ((1u << N) - 1));
        MatrixQ G = build_G_y<Rational>(M, N, d, y);
        for (Eigen::Index i = 0; i < G.rows(); ++i)
            for (Eigen::Index j = 0; j < G.cols(); ++j) {
                EXPECT_EQ(G(i, j), G(j, i));
                EXPECT_GT(G(i, j), 0);
            }
        std::vector<int> perm(N);
        std::iota(perm.begin(), perm.end(), 1);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto move = [&](const BitString &x) {
            std::vector<int> s;
            for (int site : x.sites()) s.push_back(perm[site - 1]);
            return BitString::from_sites(N, s);
        };
        MatrixQ H = build_G_y<Rational>(M, N, d, move(y));
        auto xs = enumerate_weight(N, M);
        for (const auto &x : xs)
            for (const auto &z : xs)
                EXPECT_EQ(G(canonical_index(x), canonical_index(z)), H(canonical_index(move(x)), canonical_index(move(z))));
    }
}

TEST(Spectrum, Examples) {
    auto s = g0_spectrum(1, 2, 2);
    ASSERT_EQ(s.levels.size(), 2u);
    EXPECT_EQ(s.levels[0].value, Rational(3, 2));
    EXPECT_EQ(s.levels[0].degeneracy, 1);
    EXPECT_EQ(s.levels[1].value, Rational(1, 2));
    EXPECT_EQ(s.levels[1].degeneracy, 1);

    auto z = g0_spectrum(0, 4, 3);
    ASSERT_EQ(z.levels.size(), 1u);
    EXPECT_EQ(z.levels[0].value, 1);

    auto t = g0_spectrum(2, 4, 2);
    ASSERT_EQ(t.levels.size(), 3u);
    EXPECT_EQ(t.levels[0].degeneracy, 1);
    EXPECT_EQ(t.levels[1].degeneracy, 3);
    EXPECT_EQ(t.levels[2].degeneracy, 2);
    EXPECT_EQ(t.total_degeneracy(), 6);
}

TEST(Spectrum, DegeneracyAndTraceSums) {
    for (int d = 2; d <= 4; ++d)
        for (int N = 1; N <= 9; ++N)
            for (int M = 0; M <= N; ++M) {
                auto s = g0_spectrum(M, N, d);
                EXPECT_EQ(s.total_degeneracy(), binom(N, M));
                MatrixQ G = build_G_y<Rational>(M, N, d, BitString::zeros(N));
                EXPECT_EQ(s.weighted_trace(), G.trace());
                for (const auto &l : s.levels) EXPECT_GT(l.value, 0);
            }
}

TEST(Spectrum, MatchesDenseEigensolver) {
    for (int d = 2; d <= 3; ++d)
        for (int N = 1; N <= 8; ++N)
            for (int M = 1; M <= N; ++M) {
                auto lv = g0_spectrum(M, N, d).levels;
                std::sort(lv.begin(), lv.end(), [](const auto &a, const auto &b) { return a.value > b.value; });
                auto num = numeric_spectrum(build_G_y<double>(M, N, d, BitString::zeros(N)));
                ASSERT_EQ(lv.size(), num.size()) << M << ' ' << N << ' ' << d;
                for (std::size_t i = 0; i < lv.size(); ++i) {
                    EXPECT_NEAR(to_double(lv[i].value), num[i].value, 1e-10);
                    EXPECT_EQ(lv[i].degeneracy, num[i].degeneracy);
                }
            }
}

TEST(Lift, ReproducesNextSpectrum) {
    auto f0 = g0_overlap_values(0, 2), f1 = g0_overlap_values(1, 2);
    auto lifted = eig_lift(g0_spectrum(0, 2, 2), 0, 2, f0, f1);
    auto direct = g0_spectrum(1, 2, 2);
    ASSERT_EQ(lifted.levels.size(), direct.levels.size());
    for (std::size_t i = 0; i < direct.levels.size(); ++i) {
        EXPECT_EQ(lifted.levels[i].value, direct.levels[i].value);
        EXPECT_EQ(lifted.levels[i].degeneracy, direct.levels[i].degeneracy);
    }
    for (int d = 2; d <= 4; ++d)
        for (int N = 2; N <= 7; ++N)
            for (int M = 0; M < N; ++M) {
                auto fm = g0_overlap_values(M, d), fm1 = g0_overlap_values(M + 1, d);
                EXPECT_EQ(lift_ratio(M, N, 0, fm, fm1), Rational(N - M - 1 + d, M + d));
                auto up = eig_lift(g0_spectrum(M, N, d), M, N, fm, fm1);
                EXPECT_EQ(up.total_degeneracy(), binom(N, M + 1));
                EXPECT_EQ(up.weighted_trace(), g0_spectrum(M + 1, N, d).weighted_trace());
            }
}

TEST(Lift, RejectsKDependentRatio) {
    std::vector<Rational> f = {1, Rational(1, 3)}, g = {1, Rational(1, 5), Rational(1, 7)};
    EXPECT_THROW(eig_lift(g0_spectrum(1, 4, 2), 1, 4, f, g), std::domain_error);
}

TEST(Inverse, Examples) {
    EXPECT_TRUE(same(g0_inverse<Rational>(1, 2, 2), mq({{Rational(4, 3), Rational(-2, 3)}, {Rational(-2, 3), Rational(4, 3)}})));
    for (int d = 2; d <= 3; ++d)
        for (int N = 1; N <= 6; ++N)
            for (int M = 0; M <= N; ++M) {
                MatrixQ P = build_G_y<Rational>(M, N, d, BitString::zeros(N)) * g0_inverse<Rational>(M, N, d);
                EXPECT_TRUE(same(P, MatrixQ::Identity(P.rows(), P.cols()))) << M << ' ' << N << ' ' << d;
            }
    EXPECT_THROW(g0_inverse<Rational>(1, 2, 1), std::invalid_argument);
}

TEST(RowSum, Examples) {
    EXPECT_EQ(row_sum_symmetric(1, 1, 2, 2), Rational(5, 2));
    for (int d = 2; d <= 3; ++d)
        for (int N = 1; N <= 6; ++N)
            for (int M = 1; M <= N; ++M) {
                EXPECT_EQ(g0_spectrum(M, N, d).levels.front().value, build_G_y<Rational>(M, N, d, BitString::zeros(N)).row(0).sum());
                for (int L = 1; L <= N; ++L) {
                    MatrixQ G = build_G_ML<Rational>(M, N, d, L, BitString::zeros(N));
                    for (Eigen::Index r = 0; r < G.rows(); ++r) EXPECT_EQ(G.row(r).sum(), row_sum_symmetric(M, L, N, d));
                }
            }
}

TEST(Json, GramRowsAreRationalStrings) {
    auto j = gram_to_json(1, 2, 2, BitString::parse("00"), -1, build_G_y<Rational>(1, 2, 2, BitString::parse("00")));
    EXPECT_EQ(j["rows"][0][1], "1/2");
    EXPECT_EQ(j["y"], "00");
    EXPECT_FALSE(j.contains("L"));
}
