#pragma once

#include "clonetrade/bitstrings.hpp"

#include <complex>
#include <map>
#include <vector>

namespace clonetrade {

using cplx = std::complex<double>;

// Site 0 is the most significant digit of a basis index.
struct DenseOperator {
    std::vector<int> dims;
    Eigen::MatrixXcd data;
    int in_sites = 0;  // leading IN sites, when the operator is a cloning Choi operator
};

struct DenseState {
    std::vector<int> dims;
    Eigen::VectorXcd amplitudes;
};

struct SymBasis {
    int n = 0;
    int d = 0;
    std::vector<std::vector<int>> occupations;  // nondecreasing digit sequences
    std::vector<Eigen::VectorXd> vectors;
};

struct SpinOperators {
    Eigen::MatrixXcd X, Y, Z;
};

struct TotalSpin {
    Eigen::MatrixXcd JX, JY, JZ, J2;
};

// Hilbert-dimension budget: CLONETRADE_MAX_DIM, default 4096.
std::size_t max_dim();
std::size_t total_dim(const std::vector<int> &dims);

// Cached list of all permutations of {0..n-1}.
const std::vector<std::vector<int>> &permutations(int n);

// perm[s] is the position that site s moves to.
DenseOperator permutation_operator(const std::vector<int> &dims, const std::vector<int> &perm);

DenseOperator sym_projector(int n, int d);
// Projector onto the symmetric subspace of `sites` (0-based), identity elsewhere.
DenseOperator sym_projector_on(const std::vector<int> &dims, const std::vector<int> &sites);

SymBasis sym_basis(int n, int d);

// Normalised as 2S: the Pauli matrices for d = 2.
SpinOperators spin_operators(int d);
TotalSpin total_spin(int N, int d);
Eigen::MatrixXcd embed_site(const Eigen::MatrixXcd &op, int site, int n, int d);
Eigen::MatrixXcd u_inversion(int d);

DenseOperator partial_transpose(const DenseOperator &op, const BitString &sites);

// R_y on IN (M sites) + OUT (N sites).
DenseOperator build_R_single(int M, int N, int d, const BitString &y);
DenseOperator build_R(int M, int N, int d, const std::map<BitString, double> &alpha);
DenseOperator build_R(int M, int N, int d, const std::map<BitString, Rational> &alpha);

struct EigenPair {
    double value = 0;
    DenseState vector;
};

// Largest-|amplitude| entry rotated to positive real; ties go to the lowest index.
void fix_phase(Eigen::VectorXcd &v);
EigenPair max_eig(const DenseOperator &op);

DenseState ghz_state(int n, int d);
DenseState computational_state(const std::vector<int> &digits, int d);
bool is_symmetric(const DenseState &phi, int d, double tol = 1e-10);

DenseState build_psi_x(int M, int N, int d, const BitString &x, const DenseState &phi);
DenseState build_chi(int M, int N, int d, const std::map<BitString, double> &beta, const DenseState &phi);
double fidelity_direct(const DenseState &chi, int M, int N, int d, const BitString &y);

double eta_norm_check(int M, int N, int d, const BitString &x, const BitString &y, const DenseState &phi);
double eta_norm_check(int M, int N, int d, const BitString &x, const BitString &y);

// Operator-norm residual of [rho, rotated J_Z] and [rho, rotated J^2] on M + w sites.
double commutator_check(int M, int w, int d);

// Max entrywise residual of the M = w = 1 twirling identity.
double twirl_check(int d);

// Per M_Z block: the block's dominant eigenvector, phase fixed, has no amplitude below -1e-10.
bool lieb_mattis_check(const DenseOperator &R);
// Basis indices grouped by the rotated-J_Z eigenvalue.
std::vector<std::vector<Eigen::Index>> mz_blocks(const DenseOperator &R);

bool phi_trace_check(const DenseState &phi, int M, int d);

// Reduced density matrix on the first `keep` sites.
Eigen::MatrixXcd reduced_state(const DenseState &psi, int keep);

}  // namespace clonetrade
