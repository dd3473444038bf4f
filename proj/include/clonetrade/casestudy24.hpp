#pragma once

#include "clonetrade/tradeoff.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace clonetrade {

// 2 -> 4 cloning of qubits with pair fidelities and F_y = F_ybar.
struct PairFidelities {
    double F1100 = 0, F1010 = 0, F0110 = 0;

    double operator[](int A) const { return A == 0 ? F1100 : (A == 1 ? F1010 : F0110); }
    double &operator[](int A) { return A == 0 ? F1100 : (A == 1 ? F1010 : F0110); }
    double sum() const { return F1100 + F1010 + F0110; }
};

// Full six-string target map with F_y = F_ybar.
FidelityVector expand_pairs(const PairFidelities &F);

// Row order used by the basis change: 0011, 0101, 1001, 0110, 1010, 1100.
std::vector<BitString> printed_order();
// H~ in printed order; symmetric and involutive.
Eigen::MatrixXd basis_change();
// H~ P G P^T H~ for a canonical-order 6x6 matrix.
Eigen::MatrixXd conjugate(const Eigen::MatrixXd &G_canonical);
MatrixQ printed_G0_conjugate();
MatrixQ printed_difference_conjugate();  // H~(G_0011 - G_1100)H~ as printed
// beta~ in the H~ basis -> canonical-order beta.
BetaMap beta_from_tilde(const Eigen::VectorXd &beta_tilde);

enum class CaseModel { Exact, Printed };
std::string to_string(CaseModel m);

// Printed relations.
double class2_relation(const PairFidelities &F);  // throws std::domain_error on a negative radicand
struct Class1Report {
    double residual = 0;
    std::array<bool, 3> flags{};
    bool valid() const { return flags[0] && flags[1] && flags[2]; }
};
Class1Report class1_relation(const PairFidelities &F);

// Relations derived from the Gram matrices themselves.
double class2_relation_exact(const PairFidelities &F);
double class1_relation_exact(const PairFidelities &F);

// Class-1 variants: `special` is the pair whose component is fixed by the other two.
PairFidelities class1_permute(const PairFidelities &F, int special);

struct CaseWitness {
    Eigen::VectorXd beta_tilde;
    BetaMap beta;
    double norm = 0;  // beta^T G_0 beta
};
// (a, b, c, 0, 0, 0) reconstruction; throws std::domain_error outside the class-2 domain.
CaseWitness class2_witness(const PairFidelities &F, CaseModel model);

// beta^T G_y beta and the dense oracle, over the six pair strings (canonical order).
std::array<double, 6> quadratic_pair_fidelities(const BetaMap &beta);
std::array<double, 6> oracle_pair_fidelities(const BetaMap &beta);

// Points on the class-2 surface from the (a, b, c) parametrisation.
std::vector<PairFidelities> class2_surface_samples(CaseModel model, int count, unsigned seed);

struct RegionPoint {
    bool member = false;
    std::string cls = "none";  // class1, class2 or none
    double margin = 0;         // exact model: best min_A(F_A(beta) - target_A)
    std::optional<PairFidelities> surface;
    std::optional<BetaMap> witness;
};

RegionPoint region_membership(const PairFidelities &F, double grid_tol = 1e-6, CaseModel model = CaseModel::Exact,
                              bool locate_surface = false);

// CSV "F_1100,F_1010,F_0110,member,class" over the grid i/(grid-1).
void write_region_csv(std::ostream &out, int grid, CaseModel model = CaseModel::Exact);

}  // namespace clonetrade
