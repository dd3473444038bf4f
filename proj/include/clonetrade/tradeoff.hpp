#pragma once

#include "clonetrade/convex.hpp"
#include "clonetrade/gram.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clonetrade {

struct CloneProblem {
    int M = 1;
    int L = 1;
    int N = 2;
    int d = 2;
    std::vector<BitString> Lambda;  // empty: all weight-L strings

    void validate() const;
    std::vector<BitString> lambda() const;
};

using FidelityVector = std::map<BitString, double>;
using FidelityVectorQ = std::map<BitString, Rational>;
using BetaMap = std::map<BitString, double>;

enum class Verdict { Feasible, Infeasible, Undetermined };
std::string to_string(Verdict v);

struct TradeoffResult {
    Verdict verdict = Verdict::Undetermined;
    std::optional<BetaMap> witness_beta;
    std::optional<FidelityVector> achieved;
    std::map<std::string, double> residuals;
    std::string note;
};

// Row-sum form and double-sum form of the symmetric optimum; both exact.
Rational symmetric_fidelity(int M, int L, int N, int d);
Rational symmetric_fidelity_sum(int M, int L, int N, int d);
Rational wang_formula(int M, int L, int N, int d);

struct SumTestReport {
    bool passes = true;           // false: cloning certainly impossible
    double total = 0;             // sum of targets
    Rational bound;               // |Lambda| * F_sym
    Rational bound_printed;       // binom(N, M) * F_sym
    bool passes_printed = true;
};
SumTestReport necessary_sum_test(const CloneProblem &problem, const FidelityVector &targets);

// beta^T G_y beta over weight-M strings.
double quadratic_fidelity(const BetaMap &beta, int M, int N, int d, const BitString &y);
double quadratic_norm(const BetaMap &beta, int M, int N, int d);

// sum F - (sum sqrt(1-F))^2/(d-1)
double nminus1_objective(const Eigen::VectorXd &F, int d);
TradeoffResult solve_Nminus1(int N, int d, const FidelityVector &targets);

// (d+1) sum F/(N+d-1) - 1 - (sum sqrt(F(d+1)-1)/(N+d-1))^2, radicands clipped at 0.
double tradeoff_residual(int d, const std::vector<double> &F);
double tradeoff_1_to_N(int N, int d, const std::vector<double> &known);

struct Rank1Reduction {
    int N = 0, d = 0, L = 0;
    double g0 = 0, g1 = 0, g2 = 0;
    double gamma1 = 0, gamma2 = 0;
    std::array<Rational, 6> a;           // printed closed forms
    std::array<Rational, 6> a_measured;  // read off G^(1,L) with |j> = sum_{n>=2} |n>
    Eigen::VectorXd Gamma;               // site order
    double singular_ratio = 0;
};
Rank1Reduction rank1_reduction(int N, int d, int L);

// g0*G_0 + g1*G^(1,L)_{y} + g2*G^(1,L)_0 in site order, y = {site}.
Eigen::MatrixXd rank1_combination(const Rank1Reduction &red, int site);

struct BetaRecovery {
    bool ok = false;
    Eigen::VectorXd beta;  // site order
    double min_radicand = 0;
    std::string reason;
};
// Per-site sums S_n = sum_{y contains n} F_y and q = sum F_y.
BetaRecovery beta_from_site_sums(const Rank1Reduction &red, const Eigen::VectorXd &S, double q,
                                 const std::vector<int> &signs = {});
BetaRecovery beta_from_fidelities(const Rank1Reduction &red, const FidelityVector &targets);

struct ConsistencyMatrix {
    int M = 1, L = 0, N = 0;
    MatrixQ X;
    std::vector<VectorQ> kernel;
    long rank = 0;
    bool guarded = false;
    std::string flag;
};
ConsistencyMatrix kernel_X(int M, int L, int N);
// sum_y v_y G_y^(M) == 0 exactly for every kernel vector.
bool kernel_annihilates(const ConsistencyMatrix &cm, int d);
long exact_rank(const MatrixQ &A);
std::vector<VectorQ> exact_kernel(const MatrixQ &A);

TradeoffResult feasibility_1LN(int N, int d, int L, const FidelityVector &targets);

// Sites are 1-based; beta in site order.
double residual_quadratics(const Eigen::VectorXd &beta, int d, int L, int a, int b, int c, int dd);
// Right-hand side alone (includes the binom(N-4, L-2) multiplicity).
double cons2_rhs(const Eigen::VectorXd &beta, int d, int L, int a, int b, int c, int dd);

// Multi-start local maximisation of min_k (b'G_k b - t_k) subject to b'G0 b = 1.
// Returns (best b, its margin); deterministic for a fixed seed.
std::pair<Eigen::VectorXd, double> maximize_min_margin(const std::vector<Eigen::MatrixXd> &G,
                                                       const Eigen::VectorXd &targets, const Eigen::MatrixXd &G0,
                                                       const std::vector<Eigen::VectorXd> &starts, int random_starts,
                                                       unsigned seed);

enum class Rank1Class { Exists, Excluded, Unknown };
std::string to_string(Rank1Class c);
Rank1Class rank1_classification(int M, int L, int N);

double success_probability(const BetaMap &beta, int M, int N, int d);

BetaMap site_beta_map(const Eigen::VectorXd &beta);

// Re-evaluates a Feasible witness with the dense oracle; returns max |F_direct - F_quadratic|.
double oracle_confirmation(const TradeoffResult &res, int M, int N, int d);

}  // namespace clonetrade
