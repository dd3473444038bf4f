#include "clonetrade/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace clonetrade {

namespace {

std::vector<int> uniform_dims(int n, int d) { return std::vector<int>(n, d); }

std::vector<int> to_digits(std::size_t index, const std::vector<int> &dims) {
    std::vector<int> a(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
        a[s] = static_cast<int>(index % dims[s]);
        index /= dims[s];
    }
    return a;
}

std::size_t from_digits(const std::vector<int> &a, const std::vector<int> &dims) {
    std::size_t index = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) index = index * dims[s] + a[s];
    return index;
}

void check_budget(std::size_t dim) {
    if (dim > max_dim()) {
        throw std::length_error("Hilbert dimension " + std::to_string(dim) + " exceeds budget " +
                                std::to_string(max_dim()) + " (set CLONETRADE_MAX_DIM)");
    }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &A, const Eigen::MatrixXcd &B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return K;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    Eigen::VectorXcd k(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) k.segment(i * b.size(), b.size()) = a(i) * b;
    return k;
}

double op_norm(const Eigen::MatrixXcd &A) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(0);
}

std::vector<int> out_positions(int M, const BitString &y) {
    std::vector<int> pos;
    for (int s : y.sites()) pos.push_back(M + s - 1);
    return pos;
}

}  // namespace

std::size_t max_dim() {
    if (const char *env = std::getenv("CLONETRADE_MAX_DIM")) {
        char *end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 4096;
}

std::size_t total_dim(const std::vector<int> &dims) {
    std::size_t D = 1;
    for (int d : dims) D *= static_cast<std::size_t>(d);
    return D;
}

const std::vector<std::vector<int>> &permutations(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<std::vector<int>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> all;
    do {
        all.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return cache.emplace(n, std::move(all)).first->second;
}

DenseOperator permutation_operator(const std::vector<int> &dims, const std::vector<int> &perm) {
    const std::size_t D = total_dim(dims);
    check_budget(D);
    DenseOperator P{dims, Eigen::MatrixXcd::Zero(D, D)};
    std::vector<int> b(dims.size());
    for (std::size_t i = 0; i < D; ++i) {
        auto a = to_digits(i, dims);
        for (std::size_t s = 0; s < dims.size(); ++s) b[perm[s]] = a[s];
        P.data(from_digits(b, dims), i) = 1.0;
    }
    return P;
}

DenseOperator sym_projector_on(const std::vector<int> &dims, const std::vector<int> &sites) {
    const std::size_t D = total_dim(dims);
    check_budget(D);
    for (int s : sites) {
        if (s < 0 || s >= static_cast<int>(dims.size())) throw std::invalid_argument("site out of range");
        if (dims[s] != dims[sites.front()]) throw std::invalid_argument("symmetrised sites must share a dimension");
    }
    const int k = static_cast<int>(sites.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(D, D);
    std::vector<std::vector<int>> digits(D);
    for (std::size_t i = 0; i < D; ++i) digits[i] = to_digits(i, dims);
    std::vector<int> b;
    const auto &perms = permutations(k);
    for (const auto &p : perms) {
        for (std::size_t i = 0; i < D; ++i) {
            b = digits[i];
            for (int t = 0; t < k; ++t) b[sites[p[t]]] = digits[i][sites[t]];
            P(from_digits(b, dims), i) += 1.0;
        }
    }
    P /= static_cast<double>(perms.size());
    return {dims, P.cast<cplx>()};
}

DenseOperator sym_projector(int n, int d) {
    std::vector<int> sites(n);
    std::iota(sites.begin(), sites.end(), 0);
    return sym_projector_on(uniform_dims(n, d), sites);
}

SymBasis sym_basis(int n, int d) {
    auto dims = uniform_dims(n, d);
    const std::size_t D = total_dim(dims);
    check_budget(D);
    std::map<std::vector<int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < D; ++i) {
        auto a = to_digits(i, dims);
        std::sort(a.begin(), a.end());
        groups[a].push_back(i);
    }
    SymBasis basis{n, d, {}, {}};
    for (const auto &[occ, members] : groups) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(D);
        double amp = 1.0 / std::sqrt(static_cast<double>(members.size()));
        for (auto i : members) v(i) = amp;
        basis.occupations.push_back(occ);
        basis.vectors.push_back(v);
    }
    return basis;
}

SpinOperators spin_operators(int d) {
    SpinOperators S{Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d)};
    for (int n = 1; n < d; ++n) {
        double c = std::sqrt(static_cast<double>(n * (d - n)));
        S.X(n - 1, n) = c;
        S.X(n, n - 1) = c;
        S.Y(n, n - 1) = cplx(0, c);
        S.Y(n - 1, n) = cplx(0, -c);
    }
    for (int n = 0; n < d; ++n) S.Z(n, n) = static_cast<double>(d - 1 - 2 * n);
    return S;
}

Eigen::MatrixXcd embed_site(const Eigen::MatrixXcd &op, int site, int n, int d) {
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(std::pow(d, site)),
                                                       static_cast<Eigen::Index>(std::pow(d, site)));
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(std::pow(d, n - site - 1)),
                                                        static_cast<Eigen::Index>(std::pow(d, n - site - 1)));
    return kron(kron(left, op), right);
}

TotalSpin total_spin(int N, int d) {
    check_budget(total_dim(uniform_dims(N, d)));
    auto S = spin_operators(d);
    const auto D = static_cast<Eigen::Index>(total_dim(uniform_dims(N, d)));
    TotalSpin J{Eigen::MatrixXcd::Zero(D, D), Eigen::MatrixXcd::Zero(D, D), Eigen::MatrixXcd::Zero(D, D), {}};
    for (int n = 0; n < N; ++n) {
        J.JX += embed_site(S.X, n, N, d);
        J.JY += embed_site(S.Y, n, N, d);
        J.JZ += embed_site(S.Z, n, N, d);
    }
    J.J2 = J.JX * J.JX + J.JY * J.JY + J.JZ * J.JZ;
    return J;
}

Eigen::MatrixXcd u_inversion(int d) {
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) U(n, d - 1 - n) = (n % 2) ? -1.0 : 1.0;
    return U;
}

DenseOperator partial_transpose(const DenseOperator &op, const BitString &sites) {
    if (sites.length() != static_cast<int>(op.dims.size())) throw std::invalid_argument("site flags do not match operator arity");
    const std::size_t D = total_dim(op.dims);
    DenseOperator out{op.dims, Eigen::MatrixXcd::Zero(D, D), op.in_sites};
    std::vector<std::vector<int>> digits(D);
    for (std::size_t i = 0; i < D; ++i) digits[i] = to_digits(i, op.dims);
    auto flagged = sites.sites();
    for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = 0; j < D; ++j) {
            if (op.data(i, j) == cplx(0)) continue;
            auto a = digits[i];
            auto b = digits[j];
            for (int s : flagged) std::swap(a[s - 1], b[s - 1]);
            out.data(from_digits(a, op.dims), from_digits(b, op.dims)) = op.data(i, j);
        }
    }
    return out;
}

DenseOperator build_R_single(int M, int N, int d, const BitString &y) {
    if (M < 1 || N < 1 || d < 2) throw std::invalid_argument("require M, N >= 1 and d >= 2");
    if (y.length() != N) throw std::invalid_argument("label length must equal N");
    const int n = M + N;
    auto dims = uniform_dims(n, d);
    check_budget(total_dim(dims));
    std::vector<int> sites(M);
    std::iota(sites.begin(), sites.end(), 0);
    for (int p : out_positions(M, y)) sites.push_back(p);
    auto P = sym_projector_on(dims, sites);
    std::vector<int> in(M);
    std::iota(in.begin(), in.end(), 1);
    auto R = partial_transpose(P, BitString::from_sites(n, in));
    const int w = y.weight();
    R.data *= to_double(binom_q(M + d - 1, M) / binom_q(M + w + d - 1, M + w));
    R.in_sites = M;
    return R;
}

template <typename W>
static DenseOperator build_R_impl(int M, int N, int d, const std::map<BitString, W> &alpha) {
    if (alpha.empty()) throw std::invalid_argument("empty weight map");
    W total = 0;
    for (const auto &[y, a] : alpha) {
        if (a < 0) throw std::invalid_argument("weights must be non-negative");
        total += a;
    }
    if constexpr (std::is_same_v<W, Rational>) {
        if (total != 1) throw std::invalid_argument("weights must sum to 1");
    } else {
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    }
    const int n = M + N;
    auto dims = uniform_dims(n, d);
    const std::size_t D = total_dim(dims);
    check_budget(D);
    DenseOperator R{dims, Eigen::MatrixXcd::Zero(D, D), M};
    for (const auto &[y, a] : alpha) {
        if (a == 0) continue;
        double ad;
        if constexpr (std::is_same_v<W, Rational>) {
            ad = to_double(a);
        } else {
            ad = a;
        }
        R.data += ad * build_R_single(M, N, d, y).data;
    }
    return R;
}

DenseOperator build_R(int M, int N, int d, const std::map<BitString, double> &alpha) {
    return build_R_impl(M, N, d, alpha);
}

DenseOperator build_R(int M, int N, int d, const std::map<BitString, Rational> &alpha) {
    return build_R_impl(M, N, d, alpha);
}

void fix_phase(Eigen::VectorXcd &v) {
    Eigen::Index best = 0;
    double mag = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > mag + 1e-12) {
            mag = std::abs(v(i));
            best = i;
        }
    }
    if (mag <= 0) return;
    v *= std::conj(v(best)) / mag;
}

EigenPair max_eig(const DenseOperator &op) {
    const auto &A = op.data;
    if (A.rows() != A.cols()) throw std::invalid_argument("operator must be square");
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw std::invalid_argument("operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    const Eigen::Index top = A.rows() - 1;
    Eigen::VectorXcd v = es.eigenvectors().col(top);
    fix_phase(v);
    return {es.eigenvalues()(top), {op.dims, v}};
}

DenseState ghz_state(int n, int d) {
    auto dims = uniform_dims(n, d);
    const std::size_t D = total_dim(dims);
    check_budget(D);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(D);
    for (int i = 0; i < d; ++i) v(from_digits(std::vector<int>(n, i), dims)) = 1.0 / std::sqrt(static_cast<double>(d));
    return {dims, v};
}

DenseState computational_state(const std::vector<int> &digits, int d) {
    auto dims = uniform_dims(static_cast<int>(digits.size()), d);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(total_dim(dims));
    v(from_digits(digits, dims)) = 1.0;
    return {dims, v};
}

bool is_symmetric(const DenseState &phi, int d, double tol) {
    const int n = static_cast<int>(phi.dims.size());
    if (n == 0) return true;
    for (int dim : phi.dims) {
        if (dim != d) return false;
    }
    auto P = sym_projector(n, d);
    return (P.data * phi.amplitudes - phi.amplitudes).norm() < tol;
}

DenseState build_psi_x(int M, int N, int d, const BitString &x, const DenseState &phi) {
    if (x.length() != N || x.weight() != M) throw std::invalid_argument("x must have length N and weight M");
    if (static_cast<int>(phi.dims.size()) != N - M) throw std::invalid_argument("Phi must live on N - M sites");
    if (!is_symmetric(phi, d)) throw std::invalid_argument("Phi is not symmetric");
    const int n = M + N;
    auto dims = uniform_dims(n, d);
    const std::size_t D = total_dim(dims);
    check_budget(D);

    auto basis = sym_basis(M, d);
    const std::size_t DM = total_dim(uniform_dims(M, d));
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(DM * DM);
    for (const auto &phi_i : basis.vectors) {
        Eigen::VectorXcd c = phi_i.cast<cplx>();
        bell += kron(c, c);
    }
    bell /= std::sqrt(static_cast<double>(basis.vectors.size()));
    Eigen::VectorXcd natural = N - M > 0 ? kron(bell, phi.amplitudes) : bell;

    // natural slot -> physical site
    std::vector<int> place;
    for (int t = 0; t < M; ++t) place.push_back(t);
    for (int s : x.sites()) place.push_back(M + s - 1);
    for (int s : complement(x).sites()) place.push_back(M + s - 1);

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(D);
    std::vector<int> b(n);
    for (std::size_t i = 0; i < D; ++i) {
        if (natural(i) == cplx(0)) continue;
        auto a = to_digits(i, dims);
        for (int t = 0; t < n; ++t) b[place[t]] = a[t];
        out(from_digits(b, dims)) = natural(i);
    }
    return {dims, out};
}

DenseState build_chi(int M, int N, int d, const std::map<BitString, double> &beta, const DenseState &phi) {
    const auto dims = uniform_dims(M + N, d);
    DenseState chi{dims, Eigen::VectorXcd::Zero(total_dim(dims))};
    for (const auto &[x, b] : beta) {
        if (b == 0) continue;
        chi.amplitudes += b * build_psi_x(M, N, d, x, phi).amplitudes;
    }
    return chi;
}

double fidelity_direct(const DenseState &chi, int M, int N, int d, const BitString &y) {
    if (static_cast<int>(chi.dims.size()) != M + N) throw std::invalid_argument("state does not live on IN + OUT");
    auto R = build_R_single(M, N, d, y);
    if (R.data.rows() != chi.amplitudes.size()) throw std::invalid_argument("dimension mismatch");
    return chi.amplitudes.dot(R.data * chi.amplitudes).real();
}

double eta_norm_check(int M, int N, int d, const BitString &x, const BitString &y, const DenseState &phi) {
    if (y.weight() != M) throw std::invalid_argument("y must have weight M");
    auto psi = build_psi_x(M, N, d, y, phi);
    const int wx = x.weight();
    const int k = dot(x, y);
    Rational scale2 = binom_q(M + d - 1, M) * binom_q(wx - k + d - 1, d - 1) / binom_q(wx + M - k + d - 1, d - 1);
    auto P = sym_projector_on(psi.dims, out_positions(M, bit_or(x, y)));
    Eigen::VectorXcd eta = std::sqrt(to_double(scale2)) * (P.data * psi.amplitudes);
    return eta.norm();
}

double eta_norm_check(int M, int N, int d, const BitString &x, const BitString &y) {
    return eta_norm_check(M, N, d, x, y, ghz_state(N - M, d));
}

double commutator_check(int M, int w, int d) {
    const int n = M + w;
    auto P = sym_projector(n, d);
    std::vector<int> in(M);
    std::iota(in.begin(), in.end(), 1);
    auto rho = partial_transpose(P, BitString::from_sites(n, in)).data;
    rho /= rho.trace();
    auto J = total_spin(n, d);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::MatrixXcd UI = u_inversion(d);
    for (int s = 0; s < n; ++s) U = kron(U, s < M ? UI : Eigen::MatrixXcd::Identity(d, d));
    Eigen::MatrixXcd Jz = U * J.JZ * U.adjoint();
    Eigen::MatrixXcd J2 = U * J.J2 * U.adjoint();
    return std::max(op_norm(rho * Jz - Jz * rho), op_norm(rho * J2 - J2 * rho));
}

double twirl_check(int d) {
    auto P = sym_projector(2, d);
    Eigen::MatrixXcd rho = partial_transpose(P, BitString::parse("10")).data * (2.0 / (d * (d + 1.0)));
    Eigen::VectorXcd B = Eigen::VectorXcd::Zero(d * d);
    for (int i = 0; i < d; ++i) B(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(d * d, d * d) / (d * (d + 1.0)) + B * B.adjoint() / (d + 1.0);
    return (rho - target).cwiseAbs().maxCoeff();
}

std::vector<std::vector<Eigen::Index>> mz_blocks(const DenseOperator &R) {
    const int n = static_cast<int>(R.dims.size());
    const int d = R.dims.empty() ? 2 : R.dims.front();
    for (int dim : R.dims) {
        if (dim != d) throw std::invalid_argument("mixed local dimensions");
    }
    auto S = spin_operators(d);
    Eigen::MatrixXcd UI = u_inversion(d);
    Eigen::MatrixXcd rotated = UI * S.Z * UI.adjoint();
    const auto D = static_cast<Eigen::Index>(total_dim(R.dims));
    Eigen::MatrixXcd Jz = Eigen::MatrixXcd::Zero(D, D);
    for (int s = 0; s < n; ++s) Jz += embed_site(s < R.in_sites ? rotated : S.Z, s, n, d);
    Eigen::MatrixXcd off = Jz;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 1e-12) throw std::logic_error("rotated J_Z is not diagonal");
    std::vector<std::pair<double, Eigen::Index>> vals;
    for (Eigen::Index i = 0; i < D; ++i) vals.emplace_back(Jz(i, i).real(), i);
    std::stable_sort(vals.begin(), vals.end(), [](auto &a, auto &b) { return a.first < b.first; });
    std::vector<std::vector<Eigen::Index>> blocks;
    double current = 0;
    for (const auto &[v, i] : vals) {
        if (blocks.empty() || std::abs(v - current) > 1e-8) {
            blocks.emplace_back();
            current = v;
        }
        blocks.back().push_back(i);
    }
    for (auto &b : blocks) std::sort(b.begin(), b.end());
    return blocks;
}

bool lieb_mattis_check(const DenseOperator &R) {
    for (const auto &block : mz_blocks(R)) {
        const auto m = static_cast<Eigen::Index>(block.size());
        Eigen::MatrixXcd sub(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = R.data(block[a], block[b]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
        Eigen::VectorXcd v = es.eigenvectors().col(m - 1);
        fix_phase(v);
        for (Eigen::Index a = 0; a < m; ++a) {
            if (v(a).real() < -1e-10 || std::abs(v(a).imag()) > 1e-8) return false;
        }
    }
    return true;
}

Eigen::MatrixXcd reduced_state(const DenseState &psi, int keep) {
    std::vector<int> kept(psi.dims.begin(), psi.dims.begin() + keep);
    const auto DA = static_cast<Eigen::Index>(total_dim(kept));
    const auto DB = psi.amplitudes.size() / DA;
    Eigen::Map<const Eigen::MatrixXcd> A(psi.amplitudes.data(), DB, DA);
    return A.transpose() * A.conjugate();
}

bool phi_trace_check(const DenseState &phi, int M, int d) {
    if (!is_symmetric(phi, d)) throw std::invalid_argument("Phi is not symmetric");
    const int n = static_cast<int>(phi.dims.size());
    const int m = std::min(M, n);
    if (m == 0) return true;
    Eigen::MatrixXcd rho = reduced_state(phi, m);
    Eigen::MatrixXcd target = sym_projector(m, d).data / to_double(binom_q(m + d - 1, m));
    return (rho - target).cwiseAbs().maxCoeff() < 1e-10;
}

}  // namespace clonetrade
