#include "clonetrade/casestudy24.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace clonetrade;

namespace {

const double kSym = 61.0 / 69.0;
const double kExactSym = 23.0 / 30.0;

Eigen::MatrixXd canonical(const std::string &y) { return build_G_y<double>(2, 4, 2, BitString::parse(y)); }

Eigen::MatrixXd to_double(const MatrixQ &A) {
    Eigen::MatrixXd B(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) B(i, j) = clonetrade::to_double(A(i, j));
    return B;
}

}  // namespace

TEST(BasisChange, Involution) {
    Eigen::MatrixXd H = basis_change();
    EXPECT_LT((H * H - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(printed_order().front().str(), "0011");
    EXPECT_EQ(printed_order().back().str(), "1100");
}

TEST(BasisChange, ConjugatedG0IsBlockDiagonal) {
    Eigen::MatrixXd C = conjugate(canonical("0000")) * 30;
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(6, 6);
    expect.topLeftCorner(3, 3).setConstant(30);
    expect.topLeftCorner(3, 3).diagonal().setConstant(40);
    expect.bottomRightCorner(3, 3).diagonal().setConstant(20);
    EXPECT_LT((C - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BasisChange, PrintedMatricesDifferFromConjugation) {
    EXPECT_GT((to_double(printed_G0_conjugate()) - conjugate(canonical("0000"))).cwiseAbs().maxCoeff(), 0.1);
    EXPECT_GT((to_double(printed_difference_conjugate()) - conjugate(canonical("0011") - canonical("1100"))).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Class2, PrintedSymmetricPoint) {
    EXPECT_LT(std::abs(class2_relation({kSym, kSym, kSym})), 1e-12);
    EXPECT_GT(std::abs(class2_relation({kSym + 1e-3, kSym + 1e-3, kSym + 1e-3})), 1e-6);
    EXPECT_THROW(class2_relation({0.1, 0.1, 0.1}), std::domain_error);
}

TEST(Class2, ExactSymmetricPoint) {
    EXPECT_LT(std::abs(class2_relation_exact({kExactSym, kExactSym, kExactSym})), 1e-12);
    auto w = class2_witness({kExactSym, kExactSym, kExactSym}, CaseModel::Exact);
    EXPECT_NEAR(w.norm, 1, 1e-12);
    auto o = oracle_pair_fidelities(w.beta);
    for (double f : o) EXPECT_NEAR(f, kExactSym, 1e-9);
}

TEST(Class2, ExactSurfaceWitnessesMatchOracle) {
    auto samples = class2_surface_samples(CaseModel::Exact, 15, 3u);
    ASSERT_EQ(samples.size(), 15u);
    auto ys = enumerate_weight(4, 2);
    for (const auto &F : samples) {
        EXPECT_LT(std::abs(class2_relation_exact(F)), 1e-10);
        auto w = class2_witness(F, CaseModel::Exact);
        EXPECT_NEAR(w.norm, 1, 1e-10);
        auto q = quadratic_pair_fidelities(w.beta);
        auto o = oracle_pair_fidelities(w.beta);
        auto t = expand_pairs(F);
        for (int i = 0; i < 6; ++i) {
            EXPECT_NEAR(q[i], t[ys[i]], 1e-8);
            EXPECT_NEAR(o[i], t[ys[i]], 1e-8);
        }
    }
}

TEST(Class2, PrintedSurfaceWitnessesDoNotMatchOracle) {
    auto samples = class2_surface_samples(CaseModel::Printed, 10, 3u);
    auto ys = enumerate_weight(4, 2);
    double worst = 0;
    for (const auto &F : samples) {
        EXPECT_LT(std::abs(class2_relation(F)), 1e-10);
        auto o = oracle_pair_fidelities(class2_witness(F, CaseModel::Printed).beta);
        auto t = expand_pairs(F);
        for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(o[i] - t[ys[i]]));
    }
    EXPECT_GT(worst, 0.1);
}

TEST(Class2, SymmetricPointIsNotDominated) {
    for (const auto &F : class2_surface_samples(CaseModel::Exact, 400, 8u))
        EXPECT_FALSE(F[0] > kExactSym + 1e-9 && F[1] > kExactSym + 1e-9 && F[2] > kExactSym + 1e-9);
}

TEST(Class1, Examples) {
    auto a = class1_relation({6.0 / 7, 1, 1});
    EXPECT_NEAR(a.residual, 0, 1e-12);
    EXPECT_TRUE(a.flags[0]);
    EXPECT_TRUE(a.flags[1]);
    EXPECT_FALSE(a.flags[2]);
    auto b = class1_relation({9.0 / 16, 31.0 / 64, 31.0 / 64});
    EXPECT_NEAR(b.residual, 0, 1e-12);
    EXPECT_TRUE(b.valid());
    EXPECT_GT(std::abs(class1_relation({0, 0, 0}).residual), 0.1);
}

TEST(Class1, PermutationsAgree) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(0.3, 1);
    for (int k = 0; k < 50; ++k) {
        PairFidelities F{U(rng), U(rng), U(rng)};
        EXPECT_EQ(class1_relation(class1_permute(F, 0)).residual, class1_relation(F).residual);
        for (int s = 0; s < 3; ++s) {
            PairFidelities G = F;
            std::swap(G[0], G[s]);
            EXPECT_EQ(class1_relation_exact(class1_permute(F, s)), class1_relation_exact(class1_permute(G, 0)));
        }
    }
    EXPECT_THROW(class1_permute({0.5, 0.5, 0.5}, 3), std::invalid_argument);
}

TEST(Region, Membership) {
    EXPECT_TRUE(region_membership({0.5, 0.5, 0.5}).member);
    EXPECT_FALSE(region_membership({0.95, 0.95, 0.95}).member);
    EXPECT_TRUE(region_membership({kExactSym - 1e-4, kExactSym - 1e-4, kExactSym - 1e-4}).member);
    EXPECT_FALSE(region_membership({kExactSym + 1e-3, kExactSym + 1e-3, kExactSym + 1e-3}).member);
    EXPECT_FALSE(region_membership({kSym, kSym, kSym}).member);
}

TEST(Region, PrintedModelAcceptsPrintedSymmetricPoint) {
    EXPECT_TRUE(region_membership({kSym, kSym, kSym}, 1e-6, CaseModel::Printed).member);
    EXPECT_TRUE(region_membership({0.5, 0.5, 0.5}, 1e-6, CaseModel::Printed).member);
    EXPECT_FALSE(region_membership({0.95, 0.95, 0.95}, 1e-6, CaseModel::Printed).member);
}

TEST(Region, WitnessesReachTargets) {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> U(0.4, 0.85);
    auto ys = enumerate_weight(4, 2);
    for (int k = 0; k < 15; ++k) {
        PairFidelities F{U(rng), U(rng), U(rng)};
        auto rp = region_membership(F, 1e-9);
        if (!rp.member) continue;
        ASSERT_TRUE(rp.witness);
        auto o = oracle_pair_fidelities(*rp.witness);
        auto t = expand_pairs(F);
        for (int i = 0; i < 6; ++i) EXPECT_GE(o[i], t[ys[i]] - 1e-8);
    }
}

TEST(Region, CsvHeaderAndRows) {
    std::ostringstream out;
    write_region_csv(out, 4);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "F_1100,F_1010,F_0110,member,class");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 64);
    std::ostringstream again;
    write_region_csv(again, 4);
    EXPECT_EQ(out.str(), again.str());
}
