#include "clonetrade/casestudy24.hpp"

#include "clonetrade/hilbert.hpp"

#include <cmath>
#include <limits>
#include <algorithm>
#include <random>
#include <stdexcept>

namespace clonetrade {

namespace {

const std::array<const char *, 3> kPairs = {"1100", "1010", "0110"};

Eigen::MatrixXd printed_permutation() {
    auto order = printed_order();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(6, 6);
    for (int r = 0; r < 6; ++r) P(r, canonical_index(order[r])) = 1;
    return P;
}

Eigen::MatrixXd gram(const char *y) { return build_G_y<double>(2, 4, 2, BitString::parse(y)); }

double checked_sqrt(double x, const char *what) {
    if (x < -1e-12) throw std::domain_error(what);
    return std::sqrt(std::max(x, 0.0));
}

// One class parametrisation: columns span the beta~ subspace (H~ basis).
Eigen::MatrixXd class_basis(int cls) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(6, 3);
    if (cls == 0) {
        V(0, 0) = V(1, 1) = V(2, 2) = 1;
        return V;
    }
    int s = cls - 1;
    int o1 = (s + 1) % 3, o2 = (s + 2) % 3;
    if (o1 > o2) std::swap(o1, o2);
    V(s, 0) = -0.5;
    V(o1, 0) = 1;
    V(s, 1) = -0.5;
    V(o2, 1) = 1;
    V(5 - s, 2) = 1;
    return V;
}

struct Sample {
    std::array<double, 3> F;
    Eigen::Vector3d coords;
    int subspace;
};

struct ExactRegion {
    std::array<Eigen::MatrixXd, 4> V;  // canonical coordinates, 6x3
    std::array<Eigen::MatrixXd, 4> G0;
    std::array<std::vector<Eigen::MatrixXd>, 4> GA;
    std::vector<Sample> front;

    ExactRegion() {
        Eigen::MatrixXd PH = printed_permutation().transpose() * basis_change();
        Eigen::MatrixXd g0 = gram("0000");
        std::array<Eigen::MatrixXd, 3> ga = {gram(kPairs[0]), gram(kPairs[1]), gram(kPairs[2])};
        std::vector<Sample> all;
        const int n = 4000;
        const double golden = M_PI * (3 - std::sqrt(5.0));
        for (int k = 0; k < 4; ++k) {
            V[k] = PH * class_basis(k);
            G0[k] = V[k].transpose() * g0 * V[k];
            for (int A = 0; A < 3; ++A) GA[k].push_back(V[k].transpose() * ga[A] * V[k]);
            Eigen::MatrixXd back = Eigen::MatrixXd(G0[k].llt().matrixU()).inverse();
            for (int i = 0; i < n; ++i) {
                double z = 1 - (i + 0.5) * 2.0 / n;
                double r = std::sqrt(1 - z * z);
                Eigen::Vector3d u(r * std::cos(golden * i), r * std::sin(golden * i), z);
                Sample s;
                s.coords = back * u;
                s.subspace = k;
                for (int A = 0; A < 3; ++A) s.F[A] = s.coords.dot(GA[k][A] * s.coords);
                all.push_back(s);
            }
        }
        for (std::size_t i = 0; i < all.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < all.size() && !dominated; ++j) {
                if (i == j) continue;
                const auto &a = all[i].F, &b = all[j].F;
                bool ge = b[0] >= a[0] && b[1] >= a[1] && b[2] >= a[2];
                bool gt = b[0] > a[0] || b[1] > a[1] || b[2] > a[2];
                if (ge && (gt || j < i)) dominated = true;
            }
            if (!dominated) front.push_back(all[i]);
        }
    }

    static const ExactRegion &get() {
        static const ExactRegion region;
        return region;
    }

    RegionPoint query(const PairFidelities &t, double tol) const {
        RegionPoint rp;
        const Sample *best = nullptr;
        double best_m = -std::numeric_limits<double>::infinity();
        std::array<std::vector<std::pair<double, const Sample *>>, 4> top;
        for (const auto &s : front) {
            double m = std::min({s.F[0] - t[0], s.F[1] - t[1], s.F[2] - t[2]});
            auto &tk = top[s.subspace];
            tk.push_back({m, &s});
            if (m > best_m) {
                best_m = m;
                best = &s;
            }
        }
        auto accept = [&](int k, const Eigen::Vector3d &c, double m) {
            rp.member = m >= -tol;
            rp.margin = m;
            rp.cls = rp.member ? (k == 0 ? "class2" : "class1") : "none";
            if (rp.member) {
                Eigen::VectorXd b = V[k] * c;
                BetaMap beta;
                for (const auto &x : enumerate_weight(4, 2)) beta[x] = b(canonical_index(x));
                rp.witness = beta;
            }
            return rp;
        };
        if (best_m >= -tol || best_m < -0.1) return accept(best->subspace, best->coords, best_m);
        Eigen::Vector3d tv(t[0], t[1], t[2]);
        int best_k = best->subspace;
        Eigen::Vector3d best_c = best->coords;
        for (int k = 0; k < 4; ++k) {
            auto &tk = top[k];
            if (tk.empty()) continue;
            std::size_t keep = std::min<std::size_t>(2, tk.size());
            std::partial_sort(tk.begin(), tk.begin() + keep, tk.end(),
                              [](const auto &a, const auto &b) { return a.first > b.first; });
            if (tk[0].first < -0.1) continue;
            std::vector<Eigen::VectorXd> starts;
            for (std::size_t i = 0; i < keep; ++i) starts.push_back(tk[i].second->coords);
            auto [c, m] = maximize_min_margin(GA[k], tv, G0[k], starts, 0, 7u);
            if (m > best_m) {
                best_m = m;
                best_k = k;
                best_c = c;
            }
        }
        return accept(best_k, best_c, best_m);
    }
};

std::optional<double> printed_value(const PairFidelities &F, int relation) {
    for (int A = 0; A < 3; ++A)
        if (F[A] < 0 || F[A] > 1) return std::nullopt;
    if (relation == 0) {
        try {
            return class2_relation(F);
        } catch (const std::domain_error &) {
            return std::nullopt;
        }
    }
    auto rep = class1_relation(class1_permute(F, relation - 1));
    if (!rep.valid()) return std::nullopt;
    return rep.residual;
}

RegionPoint printed_query(const PairFidelities &F, double tol, bool locate) {
    RegionPoint rp;
    std::vector<std::array<double, 3>> dirs = {{1 - F[0], 1 - F[1], 1 - F[2]},
                                               {1 - F[0], 0, 0},
                                               {0, 1 - F[1], 0},
                                               {0, 0, 1 - F[2]}};
    auto at = [&](const std::array<double, 3> &dir, double s) {
        PairFidelities p = F;
        for (int A = 0; A < 3; ++A) p[A] = F[A] + s * dir[A];
        return p;
    };
    const int steps = 120;
    for (int rel = 0; rel < 4; ++rel) {
        for (const auto &dir : dirs) {
            std::optional<double> prev;
            double prev_s = 0;
            for (int i = 0; i <= steps; ++i) {
                double s = static_cast<double>(i) / steps;
                auto v = printed_value(at(dir, s), rel);
                if (v && std::abs(*v) <= tol) {
                    rp.member = true;
                    rp.cls = rel == 0 ? "class2" : "class1";
                    if (locate) rp.surface = at(dir, s);
                    return rp;
                }
                if (v && prev && ((*v > 0) != (*prev > 0))) {
                    double lo = prev_s, hi = s;
                    bool lo_pos = *prev > 0;
                    for (int it = 0; it < 100; ++it) {
                        double mid = 0.5 * (lo + hi);
                        auto vm = printed_value(at(dir, mid), rel);
                        if (!vm) break;
                        if ((*vm > 0) == lo_pos) lo = mid;
                        else hi = mid;
                    }
                    rp.member = true;
                    rp.cls = rel == 0 ? "class2" : "class1";
                    if (locate) rp.surface = at(dir, 0.5 * (lo + hi));
                    return rp;
                }
                prev = v;
                prev_s = s;
            }
        }
    }
    return rp;
}

}  // namespace

FidelityVector expand_pairs(const PairFidelities &F) {
    FidelityVector t;
    for (int A = 0; A < 3; ++A) {
        BitString y = BitString::parse(kPairs[A]);
        t[y] = F[A];
        t[complement(y)] = F[A];
    }
    return t;
}

std::vector<BitString> printed_order() {
    std::vector<BitString> v;
    for (const char *s : {"0011", "0101", "1001", "0110", "1010", "1100"}) v.push_back(BitString::parse(s));
    return v;
}

Eigen::MatrixXd basis_change() {
    const double s = 1 / std::sqrt(2.0);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        H(i, i) = s;
        H(5 - i, 5 - i) = -s;
        H(i, 5 - i) = H(5 - i, i) = s;
    }
    return H;
}

Eigen::MatrixXd conjugate(const Eigen::MatrixXd &G) {
    Eigen::MatrixXd P = printed_permutation();
    Eigen::MatrixXd H = basis_change();
    return H * (P * G * P.transpose()) * H;
}

MatrixQ printed_G0_conjugate() {
    MatrixQ M = MatrixQ::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M(i, j) = Rational(i == j ? 16 : 15, 30);
        M(3 + i, 3 + i) = Rational(4, 30);
    }
    return M;
}

MatrixQ printed_difference_conjugate() {
    MatrixQ M = MatrixQ::Zero(6, 6);
    M(0, 5) = M(5, 0) = Rational(2, 15);
    M(1, 5) = M(5, 1) = Rational(1, 10);
    M(2, 5) = M(5, 2) = Rational(1, 10);
    M(3, 4) = M(4, 3) = Rational(-1, 10);
    return M;
}

BetaMap beta_from_tilde(const Eigen::VectorXd &beta_tilde) {
    if (beta_tilde.size() != 6) throw std::invalid_argument("beta~ must have 6 entries");
    Eigen::VectorXd b = basis_change() * beta_tilde;
    auto order = printed_order();
    BetaMap beta;
    for (int r = 0; r < 6; ++r) beta[order[r]] = b(r);
    return beta;
}

std::string to_string(CaseModel m) { return m == CaseModel::Exact ? "exact" : "printed"; }

double class2_relation(const PairFidelities &F) {
    const double S = F.sum();
    double lhs = checked_sqrt(2 * S - 1, "class-2 radicand 2 sum F - 1 is negative");
    double rhs = 0;
    for (int A = 0; A < 3; ++A) rhs += checked_sqrt(44 * F[A] - 18 * S + 9, "class-2 radicand 44 F - 18 sum F + 9 is negative");
    return lhs - std::sqrt(3.0) * rhs;
}

Class1Report class1_relation(const PairFidelities &F) {
    const double S = F.F1010 + F.F0110, D = F.F1010 - F.F0110, A = F.F1100;
    Class1Report r;
    double c1 = 2 * S - 1 - A, c2 = 2 * S + 2 - 7 * A, c3 = 2 * S - 1 - 5.0 / 3.0 * A;
    r.residual = c2 * c1 - 4.5 * D * D;
    const double eps = 1e-12;
    r.flags = {c1 >= -eps, c2 >= -eps, c3 <= eps};
    return r;
}

double class2_relation_exact(const PairFidelities &F) {
    const double S = F.sum();
    double lhs = checked_sqrt(2 * S - 1, "class-2 radicand 2 sum F - 1 is negative");
    double rhs = 0;
    for (int A = 0; A < 3; ++A) rhs += checked_sqrt(24 * F[A] - 10 * S + 5, "class-2 radicand 24 F - 10 sum F + 5 is negative");
    return lhs - rhs;
}

double class1_relation_exact(const PairFidelities &F) {
    const double S = F.F1010 + F.F0110, D = F.F1010 - F.F0110;
    return (2 * S - 1) * (1 - 2 * F.F1100) - 3 * D * D;
}

PairFidelities class1_permute(const PairFidelities &F, int special) {
    if (special < 0 || special > 2) throw std::invalid_argument("special pair index must be 0, 1 or 2");
    int o1 = (special + 1) % 3, o2 = (special + 2) % 3;
    if (o1 > o2) std::swap(o1, o2);
    return PairFidelities{F[special], F[o1], F[o2]};
}

CaseWitness class2_witness(const PairFidelities &F, CaseModel model) {
    const double S = F.sum();
    Eigen::VectorXd bt = Eigen::VectorXd::Zero(6);
    for (int A = 0; A < 3; ++A) {
        if (model == CaseModel::Printed) {
            bt(A) = checked_sqrt(30.0 / 22.0 * (44 * F[A] - 18 * S + 9), "point outside the class-2 domain");
        } else {
            bt(A) = checked_sqrt((24 * F[A] - 10 * S + 5) / 4, "point outside the class-2 domain");
        }
    }
    CaseWitness w;
    w.beta_tilde = bt;
    w.beta = beta_from_tilde(bt);
    w.norm = quadratic_norm(w.beta, 2, 4, 2);
    return w;
}

std::array<double, 6> quadratic_pair_fidelities(const BetaMap &beta) {
    std::array<double, 6> out{};
    auto ys = enumerate_weight(4, 2);
    for (int i = 0; i < 6; ++i) out[i] = quadratic_fidelity(beta, 2, 4, 2, ys[i]);
    return out;
}

std::array<double, 6> oracle_pair_fidelities(const BetaMap &beta) {
    auto chi = build_chi(2, 4, 2, beta, ghz_state(2, 2));
    std::array<double, 6> out{};
    auto ys = enumerate_weight(4, 2);
    for (int i = 0; i < 6; ++i) out[i] = fidelity_direct(chi, 2, 4, 2, ys[i]);
    return out;
}

std::vector<PairFidelities> class2_surface_samples(CaseModel model, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<PairFidelities> out;
    for (int attempt = 0; attempt < 1000 * count && static_cast<int>(out.size()) < count; ++attempt) {
        Eigen::Vector3d a(U(rng), U(rng), U(rng));
        double sa = a.sum();
        PairFidelities F;
        if (model == CaseModel::Printed) {
            a *= std::sqrt(30.0 / (a.squaredNorm() + 15 * sa * sa));
            sa = a.sum();
            double S = (11.0 / 5.0 * sa * sa + 1) / 2;
            for (int A = 0; A < 3; ++A) F[A] = (22.0 / 30.0 * a(A) * a(A) + 18 * S - 9) / 44;
        } else {
            a /= std::sqrt(a.squaredNorm() / 3 + sa * sa);
            sa = a.sum();
            double S = (4 * sa * sa + 1) / 2;
            for (int A = 0; A < 3; ++A) F[A] = (4 * a(A) * a(A) + 10 * S - 5) / 24;
        }
        bool ok = true;
        for (int A = 0; A < 3; ++A) ok = ok && F[A] >= 0 && F[A] <= 1;
        if (ok) out.push_back(F);
    }
    return out;
}

RegionPoint region_membership(const PairFidelities &F, double grid_tol, CaseModel model, bool locate_surface) {
    if (model == CaseModel::Printed) return printed_query(F, grid_tol, locate_surface);
    const auto &region = ExactRegion::get();
    RegionPoint rp = region.query(F, grid_tol);
    if (locate_surface && rp.member) {
        double lo = 0, hi = 1;
        auto lift = [&](double s) {
            PairFidelities p = F;
            for (int A = 0; A < 3; ++A) p[A] = F[A] + s * (1 - F[A]);
            return p;
        };
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (region.query(lift(mid), grid_tol).member) lo = mid;
            else hi = mid;
        }
        rp.surface = lift(lo);
    }
    return rp;
}

void write_region_csv(std::ostream &out, int grid, CaseModel model) {
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    out << "F_1100,F_1010,F_0110,member,class\n";
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            for (int k = 0; k < grid; ++k) {
                PairFidelities F{static_cast<double>(i) / (grid - 1), static_cast<double>(j) / (grid - 1),
                                 static_cast<double>(k) / (grid - 1)};
                auto rp = region_membership(F, 1e-6, model);
                out << format_double(F.F1100) << ',' << format_double(F.F1010) << ',' << format_double(F.F0110) << ','
                    << (rp.member ? 1 : 0) << ',' << rp.cls << '\n';
            }
}

}  // namespace clonetrade
