#include "clonetrade/acceptance.hpp"

#include "clonetrade/casestudy24.hpp"
#include "clonetrade/hilbert.hpp"
#include "clonetrade/tradeoff.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clonetrade {

namespace {

std::string fmt(double x) { return format_double(x); }

struct Check {
    CriterionResult &r;
    void operator()(bool ok, const std::string &what) {
        r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        r.pass = r.pass && ok;
    }
    void note(const std::string &what) { r.details.push_back("note " + what); }
};

std::map<BitString, double> uniform_alpha(int N, int L) {
    std::map<BitString, double> a;
    auto ys = enumerate_weight(N, L);
    for (const auto &y : ys) a[y] = 1.0 / ys.size();
    return a;
}

std::map<BitString, double> random_alpha(int N, int L, std::mt19937 &rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::map<BitString, double> a;
    double s = 0;
    for (const auto &y : enumerate_weight(N, L)) s += (a[y] = U(rng) + 1e-3);
    for (auto &[y, v] : a) v /= s;
    return a;
}

double expect(const DenseOperator &R, const Eigen::VectorXcd &v) { return v.dot(R.data * v).real() / v.squaredNorm(); }

CriterionResult c1_symmetric() {
    CriterionResult r{1, "closed-form symmetric fidelities", true, {}};
    Check check{r};
    int cases = 0, sym_bad = 0, l1_bad = 0, lN_bad = 0;
    for (int d = 2; d <= 4; ++d)
        for (int N = 2; N <= 6; ++N)
            for (int M = 1; M < N; ++M)
                for (int L = 1; L <= N; ++L) {
                    ++cases;
                    Rational f = symmetric_fidelity(M, L, N, d);
                    if (f != symmetric_fidelity_sum(M, L, N, d)) ++sym_bad;
                    if (L == 1 && f != Rational(M, N) + Rational((N - M) * (M + 1), N * (M + d))) ++l1_bad;
                    if (L == N && f != binom_q(M + d - 1, M) / binom_q(N + d - 1, N)) ++lN_bad;
                }
    check(sym_bad == 0, "row-sum form equals double-sum form on " + std::to_string(cases) + " cases (" +
                            std::to_string(sym_bad) + " mismatches)");
    check(l1_bad == 0, "L=1 closed form, " + std::to_string(l1_bad) + " mismatches");
    check(lN_bad == 0, "L=N global form, " + std::to_string(lN_bad) + " mismatches");
    check(symmetric_fidelity(1, 1, 2, 2) == Rational(5, 6), "(1,1,2,2) = 5/6");
    check(symmetric_fidelity(1, 2, 2, 2) == Rational(2, 3), "(1,2,2,2) = 2/3");
    return r;
}

CriterionResult c2_wang() {
    CriterionResult r{2, "Wang-formula comparison", true, {}};
    Check check{r};
    int cases = 0, agree = 0;
    bool reproducible = true;
    std::vector<std::string> counter;
    for (int d = 2; d <= 4; ++d)
        for (int N = 2; N <= 6; ++N)
            for (int M = 1; M < N; ++M)
                for (int L = 1; L <= N; ++L) {
                    ++cases;
                    Rational w = wang_formula(M, L, N, d);
                    reproducible = reproducible && w == wang_formula(M, L, N, d);
                    if (w == symmetric_fidelity(M, L, N, d)) ++agree;
                    else if (counter.size() < 5)
                        counter.push_back("(" + std::to_string(M) + "," + std::to_string(L) + "," + std::to_string(N) +
                                          "," + std::to_string(d) + ")");
                }
    check(reproducible, "exact evaluation is reproducible");
    check(true, "agreement on " + std::to_string(agree) + "/" + std::to_string(cases) + " cases");
    for (const auto &c : counter) check.note("counterexample " + c);
    return r;
}

CriterionResult c3_oracle(bool fast) {
    CriterionResult r{3, "oracle equivalence", true, {}};
    Check check{r};
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::array<int, 4>> cases = {{1, 2, 2, 1}, {1, 3, 2, 1}, {2, 3, 2, 1}};
    if (!fast) {
        cases.push_back({1, 2, 3, 1});
        cases.push_back({2, 4, 2, 2});
    }
    for (auto [M, N, d, L] : cases) {
        auto R = build_R(M, N, d, uniform_alpha(N, L));
        double lam = max_eig(R).value;
        Rational f = symmetric_fidelity(M, L, N, d);
        std::ostringstream os;
        os << "(M,N,d,L)=(" << M << "," << N << "," << d << "," << L << ") oracle " << fmt(lam) << " closed form "
           << to_string(f);
        check(std::abs(lam - to_double(f)) < 1e-8, os.str());
        if (M == 2 && N == 4 && d == 2 && L == 2) {
            check(std::abs(lam - 61.0 / 69.0) < 1e-8, "(2,4,2,2) reproduces 61/69 = " + fmt(61.0 / 69.0) +
                                                           " (oracle " + fmt(lam) + ")");
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(secs < 120, "runtime " + fmt(secs) + " s");
    return r;
}

CriterionResult c4_surface() {
    CriterionResult r{4, "1->N trade-off surface", true, {}};
    Check check{r};
    std::mt19937 rng(4);
    for (int d : {2, 3}) {
        double worst = 0;
        for (int k = 0; k < 50; ++k) {
            auto alpha = random_alpha(3, 1, rng);
            auto R = build_R(1, 3, d, alpha);
            auto top = max_eig(R);
            std::vector<double> F;
            for (int n = 1; n <= 3; ++n)
                F.push_back(expect(build_R_single(1, 3, d, BitString::from_sites(3, {n})), top.vector.amplitudes));
            worst = std::max(worst, std::abs(tradeoff_residual(d, F)));
        }
        check(worst < 1e-7, "N=3 d=" + std::to_string(d) + ": 50 random alpha, max residual " + fmt(worst));
    }
    double f2 = tradeoff_1_to_N(2, 2, {1.0});
    check(std::abs(f2 - 0.5) < 1e-12, "F_1 = 1 gives F_2 = " + fmt(f2) + " at N=2, d=2");
    return r;
}

CriterionResult c5_nminus1() {
    CriterionResult r{5, "N-1->N solver", true, {}};
    Check check{r};
    for (int N = 3; N <= 5; ++N)
        for (int d = 2; d <= 3; ++d) {
            Rational fq = 1 - Rational(d - 1, N * (N + d - 1));
            check(fq == symmetric_fidelity(N - 1, 1, N, d), "symmetric value equals sym(N-1,1,N,d) exactly (N=" +
                                                                std::to_string(N) + ", d=" + std::to_string(d) + ")");
            FidelityVector at, above;
            for (int n = 1; n <= N; ++n) {
                at[BitString::from_sites(N, {n})] = to_double(fq);
                above[BitString::from_sites(N, {n})] = to_double(fq) + 1e-3;
            }
            auto ra = solve_Nminus1(N, d, at);
            auto rb = solve_Nminus1(N, d, above);
            check(ra.verdict == Verdict::Feasible && rb.verdict == Verdict::Infeasible,
                  "N=" + std::to_string(N) + " d=" + std::to_string(d) + ": boundary " + to_string(ra.verdict) +
                      ", +1e-3 " + to_string(rb.verdict));
        }
    // general-fidelity map against the oracle
    const int N = 3, d = 2;
    FidelityVector t;
    t[BitString::parse("100")] = 0.95;
    t[BitString::parse("010")] = 0.85;
    t[BitString::parse("011")] = 0.6;
    auto res = solve_Nminus1(N, d, t);
    check(res.verdict == Verdict::Feasible, "asymmetric targets at N=3: " + to_string(res.verdict));
    if (res.witness_beta) {
        std::vector<double> F(N);
        for (int n = 1; n <= N; ++n) F[n - 1] = quadratic_fidelity(*res.witness_beta, N - 1, N, d, BitString::from_sites(N, {n}));
        auto chi = build_chi(N - 1, N, d, *res.witness_beta, ghz_state(1, d));
        double worst = 0;
        for (int w = 1; w <= N; ++w)
            for (const auto &y : enumerate_weight(N, w)) {
                double map = 1 - w;
                for (int n : y.sites()) map += F[n - 1];
                worst = std::max(worst, std::abs(fidelity_direct(chi, N - 1, N, d, y) - map));
            }
        check(worst < 1e-8, "F_y = y.F - w_y + 1 against the oracle, max error " + fmt(worst));
    }
    return r;
}

CriterionResult c6_spectra(bool fast) {
    CriterionResult r{6, "G_0 spectra and inverse", true, {}};
    Check check{r};
    int cases = 0, bad = 0, inv_bad = 0;
    double worst = 0;
    const int maxN = fast ? 5 : 8;
    for (int d = 2; d <= 3; ++d)
        for (int N = 1; N <= maxN; ++N)
            for (int M = 1; M <= std::min(4, N); ++M) {
                ++cases;
                auto closed = g0_spectrum(M, N, d);
                auto num = numeric_spectrum(build_G_y<double>(M, N, d, BitString::zeros(N)), 1e-8);
                std::vector<SpectrumLevel> lv = closed.levels;
                std::sort(lv.begin(), lv.end(), [](const auto &a, const auto &b) { return a.value > b.value; });
                bool ok = lv.size() == num.size();
                for (std::size_t i = 0; ok && i < lv.size(); ++i) {
                    double diff = std::abs(to_double(lv[i].value) - num[i].value);
                    worst = std::max(worst, diff);
                    ok = diff < 1e-10 && lv[i].degeneracy == num[i].degeneracy;
                }
                if (!ok) ++bad;
                MatrixQ G = build_G_y<Rational>(M, N, d, BitString::zeros(N));
                MatrixQ P = g0_inverse<Rational>(M, N, d) * G;
                for (Eigen::Index i = 0; i < P.rows(); ++i)
                    for (Eigen::Index j = 0; j < P.cols(); ++j)
                        if (P(i, j) != (i == j ? 1 : 0)) {
                            ++inv_bad;
                            i = P.rows();
                            break;
                        }
            }
    check(bad == 0, "closed-form spectrum vs dense eigensolver on " + std::to_string(cases) + " cases, max value error " +
                        fmt(worst) + ", " + std::to_string(bad) + " mismatches");
    check(inv_bad == 0, "g0_inverse * G_0 = I exactly (" + std::to_string(inv_bad) + " failures)");
    return r;
}

CriterionResult c7_kernel() {
    CriterionResult r{7, "kernel consistency", true, {}};
    Check check{r};
    for (auto [M, L, N] : std::vector<std::array<int, 3>>{{1, 3, 6}, {1, 2, 5}}) {
        auto cm = kernel_X(M, L, N);
        long expected = static_cast<long>(binom(N, L).convert_to<long>()) - cm.rank;
        std::string tag = "(M,L,N)=(" + std::to_string(M) + "," + std::to_string(L) + "," + std::to_string(N) + ")";
        check(static_cast<long>(cm.kernel.size()) == expected,
              tag + " kernel dimension " + std::to_string(cm.kernel.size()) + " = binom(N,L) - rank(X) = " +
                  std::to_string(expected));
        for (int d : {2, 3}) check(kernel_annihilates(cm, d), tag + " d=" + std::to_string(d) + " sum_y v_y G_y = 0 exactly");
    }
    return r;
}

CriterionResult c8_lieb_mattis() {
    CriterionResult r{8, "Lieb-Mattis positivity", true, {}};
    Check check{r};
    std::mt19937 rng(8);
    int fails = 0;
    for (int k = 0; k < 20; ++k) {
        int M = k < 10 ? 1 : 2;
        auto R = build_R(M, 3, 2, random_alpha(3, 1, rng));
        if (!lieb_mattis_check(R)) ++fails;
    }
    check(fails == 0, "20 random instances (1->3, 2->3, d=2): " + std::to_string(fails) + " blocks with a sign change");
    return r;
}

CriterionResult c9_phi() {
    CriterionResult r{9, "achievability states", true, {}};
    Check check{r};
    check(phi_trace_check(ghz_state(3, 2), 1, 2), "GHZ-like state, M=1, N=4, d=2");
    DenseState phi{{2, 2, 2, 2}, Eigen::VectorXcd::Zero(16)};
    const double s = 1 / std::sqrt(2.0);
    for (int idx : {1, 2, 4, 8}) phi.amplitudes(idx) = s;
    phi.amplitudes(15) = 1;
    phi.amplitudes /= std::sqrt(3.0);
    check(phi_trace_check(phi, 2, 2), "sqrt(3)|Phi> state, M=2, N=6, d=2");
    check(!phi_trace_check(computational_state({0, 0, 0, 0}, 2), 2, 2), "|0000> is rejected");
    return r;
}

CriterionResult c10_identities() {
    CriterionResult r{10, "identity checks", true, {}};
    Check check{r};
    for (auto [M, N] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {2, 4}}) {
        double worst = 0;
        for (int w = 0; w <= N; ++w)
            for (const auto &x : enumerate_weight(N, w))
                for (const auto &y : enumerate_weight(N, M)) worst = std::max(worst, std::abs(eta_norm_check(M, N, 2, x, y) - 1));
        check(worst < 1e-10, "eta norm at (M,N)=(" + std::to_string(M) + "," + std::to_string(N) + "), max |eta-1| " + fmt(worst));
    }
    for (auto [M, N] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}}) {
        const int d = 2;
        auto xs = enumerate_weight(N, M);
        auto phi = ghz_state(N - M, d);
        std::vector<Eigen::VectorXcd> psi;
        for (const auto &x : xs) psi.push_back(build_psi_x(M, N, d, x, phi).amplitudes);
        double worst = 0;
        for (int w = 0; w <= N; ++w)
            for (const auto &y : enumerate_weight(N, w)) {
                MatrixQ G = build_G_y<Rational>(M, N, d, y);
                auto R = build_R_single(M, N, d, y);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    for (std::size_t j = 0; j < xs.size(); ++j) {
                        if (w == 0) worst = std::max(worst, std::abs(psi[i].dot(psi[j]) - to_double(G(i, j))));
                        worst = std::max(worst, std::abs(psi[i].dot(R.data * psi[j]) - to_double(G(i, j))));
                    }
            }
        check(worst < 1e-10, "psi_x inner products and R_y matrix elements vs G_y at (M,N)=(" + std::to_string(M) + "," +
                                 std::to_string(N) + "), max error " + fmt(worst));
    }
    for (int w : {1, 2})
        for (int d : {2, 3}) {
            double c = commutator_check(1, w, d);
            check(c < 1e-10, "commutators M=1 w=" + std::to_string(w) + " d=" + std::to_string(d) + ": " + fmt(c));
        }
    for (int d : {2, 3}) {
        double t = twirl_check(d);
        check(t < 1e-12, "twirling identity d=" + std::to_string(d) + ": " + fmt(t));
    }
    return r;
}

CriterionResult c11_case_study() {
    CriterionResult r{11, "2->4 case study", true, {}};
    Check check{r};
    const double s = 61.0 / 69.0;
    double res = class2_relation({s, s, s});
    check(std::abs(res) < 1e-12, "printed class-2 residual at (61/69)^3: " + fmt(res));

    auto samples = class2_surface_samples(CaseModel::Printed, 20, 11u);
    auto ys = enumerate_weight(4, 2);
    double worst = 0;
    for (const auto &F : samples) {
        auto w = class2_witness(F, CaseModel::Printed);
        auto o = oracle_pair_fidelities(w.beta);
        auto t = expand_pairs(F);
        for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(o[i] - t[ys[i]]));
    }
    check(worst < 1e-8, "printed class-2 surface samples (" + std::to_string(samples.size()) +
                            ") reconstructed via the oracle, max error " + fmt(worst));

    auto exact = class2_surface_samples(CaseModel::Exact, 20, 11u);
    double worst_exact = 0, worst_rel = 0;
    for (const auto &F : exact) {
        worst_rel = std::max(worst_rel, std::abs(class2_relation_exact(F)));
        auto w = class2_witness(F, CaseModel::Exact);
        auto o = oracle_pair_fidelities(w.beta);
        auto t = expand_pairs(F);
        for (int i = 0; i < 6; ++i) worst_exact = std::max(worst_exact, std::abs(o[i] - t[ys[i]]));
    }
    check.note("Gram-derived class-2 surface samples (" + std::to_string(exact.size()) + "): relation residual " +
               fmt(worst_rel) + ", oracle reconstruction error " + fmt(worst_exact));
    check.note("symmetric point of the Gram-derived surface: 23/30; residual " +
               fmt(class2_relation_exact({23.0 / 30, 23.0 / 30, 23.0 / 30})));

    bool half = region_membership({0.5, 0.5, 0.5}).member;
    bool high = region_membership({0.95, 0.95, 0.95}).member;
    check(half, "region_membership(0.5^3) = true");
    check(!high, "region_membership(0.95^3) = false");
    return r;
}

CriterionResult c12_concavity() {
    CriterionResult r{12, "concavity and success probability", true, {}};
    Check check{r};
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int violations = 0;
    for (int k = 0; k < 200; ++k) {
        int N = 2 + k % 5;
        Eigen::VectorXd x(N), z(N);
        for (int i = 0; i < N; ++i) {
            x(i) = 1 - U(rng);
            z(i) = 1 - U(rng);
        }
        double th = U(rng);
        auto f = [](const Eigen::VectorXd &v) {
            double s = v.array().sqrt().sum();
            return s * s;
        };
        if (f(th * x + (1 - th) * z) < th * f(x) + (1 - th) * f(z) - 1e-12) ++violations;
    }
    check(violations == 0, "(sum sqrt x)^2 concave on 200 random pairs: " + std::to_string(violations) + " violations");
    int pviol = 0;
    for (int k = 0; k < 100; ++k) {
        int N = 2 + k % 4;
        BetaMap beta;
        for (int n = 1; n <= N; ++n) beta[BitString::from_sites(N, {n})] = U(rng);
        double nrm = std::sqrt(quadratic_norm(beta, 1, N, 2));
        for (auto &[x, b] : beta) b /= nrm;
        if (success_probability(beta, 1, N, 2) < 1.0 / N - 1e-15) ++pviol;
    }
    check(pviol == 0, "p >= N^-M over 100 random normalised beta >= 0 (1->N, N <= 5, d=2): " + std::to_string(pviol) +
                          " violations");
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string &scope, std::ostream *progress) {
    if (scope != "fast" && scope != "full") throw std::invalid_argument("scope must be fast or full");
    const bool fast = scope == "fast";
    std::vector<CriterionResult> out;
    auto run = [&](auto fn) {
        CriterionResult res;
        try {
            res = fn();
        } catch (const std::exception &e) {
            res.pass = false;
            res.details.push_back(std::string("FAIL exception: ") + e.what());
        }
        if (progress) print_acceptance(*progress, {res});
        out.push_back(res);
    };
    run(c1_symmetric);
    run(c2_wang);
    run([&] { return c3_oracle(fast); });
    if (!fast) {
        run(c4_surface);
        run(c5_nminus1);
    }
    run([&] { return c6_spectra(fast); });
    run(c7_kernel);
    if (!fast) {
        run(c8_lieb_mattis);
        run(c9_phi);
        run(c10_identities);
        run(c11_case_study);
    }
    run(c12_concavity);
    return out;
}

void print_acceptance(std::ostream &out, const std::vector<CriterionResult> &results) {
    for (const auto &r : results) {
        out << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << '\n';
        for (const auto &d : r.details) out << "      " << d << '\n';
    }
}

}  // namespace clonetrade
