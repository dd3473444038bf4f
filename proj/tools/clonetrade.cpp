#include "clonetrade/acceptance.hpp"
#include "clonetrade/casestudy24.hpp"
#include "clonetrade/hilbert.hpp"
#include "clonetrade/tradeoff.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace clonetrade;
using nlohmann::json;

namespace {

enum Exit { kFeasible = 0, kInfeasible = 1, kUndetermined = 2, kUnsupported = 3, kBadInput = 4 };

// 15 significant digits, stored as the shortest double that prints that way.
double rounded(double x) { return std::isfinite(x) ? std::stod(format_double(x)) : x; }

json to_json(const std::map<BitString, double> &m) {
    json j = json::object();
    for (const auto &[k, v] : m) j[k.str()] = rounded(v);
    return j;
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return kFeasible;
        case Verdict::Infeasible: return kInfeasible;
        default: return kUndetermined;
    }
}

Rational read_fidelity(const json &v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return rational_from_double(v.get<double>());
    throw std::invalid_argument("fidelity must be a number or a string");
}

struct TargetFile {
    CloneProblem problem;
    FidelityVectorQ exact;
    FidelityVector targets;
};

TargetFile read_targets(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    TargetFile tf;
    tf.problem.M = j.at("M").get<int>();
    tf.problem.L = j.at("L").get<int>();
    tf.problem.N = j.at("N").get<int>();
    tf.problem.d = j.at("d").get<int>();
    for (const auto &[key, val] : j.at("targets").items()) {
        BitString y = BitString::parse(key);
        if (y.length() != tf.problem.N) throw std::invalid_argument("target " + key + " has the wrong length");
        Rational f = read_fidelity(val);
        if (f < 0 || f > 1) throw std::invalid_argument("target " + key + " outside [0,1]");
        tf.exact[y] = f;
        tf.targets[y] = to_double(f);
        tf.problem.Lambda.push_back(y);
    }
    if (tf.targets.empty()) throw std::invalid_argument("no targets");
    if (tf.problem.M != tf.problem.N - 1)
        for (const auto &[y, f] : tf.targets)
            if (y.weight() != tf.problem.L) throw std::invalid_argument("target " + y.str() + " does not have weight L");
    tf.problem.validate();
    return tf;
}

json result_json(const TradeoffResult &r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["witness"] = r.witness_beta ? to_json(*r.witness_beta) : json::object();
    if (r.achieved) j["achieved"] = to_json(*r.achieved);
    json res = json::object();
    for (const auto &[k, v] : r.residuals) res[k] = rounded(v);
    j["residuals"] = res;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

TradeoffResult global_only(const TargetFile &tf) {
    const auto &p = tf.problem;
    Rational best = symmetric_fidelity(p.M, p.N, p.N, p.d);
    const Rational &t = tf.exact.begin()->second;
    TradeoffResult r;
    r.residuals["optimum"] = to_double(best);
    r.residuals["margin"] = to_double(best - t);
    r.note = "global fidelity: optimum " + to_string(best);
    if (t > best) {
        r.verdict = Verdict::Infeasible;
        return r;
    }
    BetaMap beta;
    for (const auto &x : enumerate_weight(p.N, p.M)) beta[x] = 1;
    double n = std::sqrt(quadratic_norm(beta, p.M, p.N, p.d));
    for (auto &[x, b] : beta) b /= n;
    r.verdict = Verdict::Feasible;
    r.witness_beta = beta;
    r.achieved = FidelityVector{{tf.targets.begin()->first, quadratic_fidelity(beta, p.M, p.N, p.d, tf.targets.begin()->first)}};
    return r;
}

TradeoffResult case_study(const TargetFile &tf) {
    PairFidelities F;
    bool conjugate_symmetric = true;
    const std::array<std::string, 3> pairs = {"1100", "1010", "0110"};
    for (int A = 0; A < 3; ++A) {
        BitString y = BitString::parse(pairs[A]), yb = complement(y);
        double a = tf.targets.count(y) ? tf.targets.at(y) : 0, b = tf.targets.count(yb) ? tf.targets.at(yb) : 0;
        conjugate_symmetric = conjugate_symmetric && a == b;
        F[A] = std::max(a, b);
    }
    auto rp = region_membership(F, 1e-9, CaseModel::Exact);
    TradeoffResult r;
    r.residuals["margin"] = rp.margin;
    r.note = "2->4 region, " + rp.cls;
    if (rp.member) {
        r.verdict = Verdict::Feasible;
        r.witness_beta = rp.witness;
        FidelityVector ach;
        for (const auto &y : enumerate_weight(4, 2)) ach[y] = quadratic_fidelity(*rp.witness, 2, 4, 2, y);
        r.achieved = ach;
    } else if (conjugate_symmetric && rp.margin < -1e-3) {
        r.verdict = Verdict::Infeasible;
        r.note += " (numerical Pareto front)";
    } else {
        r.verdict = Verdict::Undetermined;
        if (!conjugate_symmetric) r.note += "; targets symmetrised by the larger of each conjugate pair";
    }
    return r;
}

int cmd_check(const std::string &path) {
    TargetFile tf;
    try {
        tf = read_targets(path);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    const auto &p = tf.problem;
    TradeoffResult r;
    try {
        if (p.M == p.N - 1) {
            r = solve_Nminus1(p.N, p.d, tf.targets);
        } else if (p.L == p.N) {
            r = global_only(tf);
        } else if (p.M == 1) {
            r = feasibility_1LN(p.N, p.d, p.L, tf.targets);
        } else if (p.M == 2 && p.N == 4 && p.L == 2 && p.d == 2) {
            r = case_study(tf);
        } else {
            json j;
            j["verdict"] = "Unsupported";
            j["classification"] = to_string(rank1_classification(p.M, p.L, p.N));
            j["explanation"] = "no solver for (M,L,N)=(" + std::to_string(p.M) + "," + std::to_string(p.L) + "," +
                               std::to_string(p.N) + "); rank-1 reduction: " + j["classification"].get<std::string>();
            std::cout << j.dump(2) << '\n';
            return kUnsupported;
        }
    } catch (const std::domain_error &e) {
        r.verdict = Verdict::Infeasible;
        r.note = e.what();
    }
    std::cout << result_json(r).dump(2) << '\n';
    return exit_for(r.verdict);
}

int cmd_symfid(int M, int N, int L, int d) {
    CloneProblem{M, L, N, d, {}}.validate();
    Rational f = symmetric_fidelity(M, L, N, d);
    Rational w = wang_formula(M, L, N, d);
    std::cout << to_string(f) << '\n';
    std::cout << "decimal " << format_double(to_double(f)) << '\n';
    std::cout << "wang " << to_string(w) << (w == f ? " agrees" : " differs") << '\n';
    return 0;
}

int cmd_gram(int M, int N, int d, const std::string &y, int L) {
    BitString by = BitString::parse(y);
    if (by.length() != N) throw CLI::ValidationError("--y", "must have N bits");
    MatrixQ G = L >= 0 ? build_G_ML<Rational>(M, N, d, L, by) : build_G_y<Rational>(M, N, d, by);
    json j = gram_to_json(M, N, d, by, L, G);
    json rows = json::array();
    for (const auto &x : enumerate_weight(N, M)) rows.push_back(x.str());
    j["basis"] = rows;
    if (L < 0 && by.weight() == 0) {
        json spec = json::array();
        for (const auto &lv : g0_spectrum(M, N, d).levels)
            spec.push_back({{"k", lv.k}, {"value", to_string(lv.value)}, {"degeneracy", lv.degeneracy.str()}});
        j["spectrum"] = spec;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_oracle(int M, int N, int d, int L, const std::string &alpha_path) {
    CloneProblem{M, L, N, d, {}}.validate();
    std::map<BitString, double> alpha;
    if (alpha_path.empty()) {
        auto ys = enumerate_weight(N, L);
        for (const auto &y : ys) alpha[y] = 1.0 / ys.size();
    } else {
        std::ifstream in(alpha_path);
        if (!in) throw std::runtime_error("cannot open " + alpha_path);
        json j = json::parse(in);
        for (const auto &[k, v] : j.items()) alpha[BitString::parse(k)] = to_double(read_fidelity(v));
    }
    auto R = build_R(M, N, d, alpha);
    auto top = max_eig(R);
    json j;
    j["M"] = M;
    j["N"] = N;
    j["d"] = d;
    j["L"] = L;
    j["lambda_max"] = rounded(top.value);
    j["dimension"] = top.vector.amplitudes.size();
    FidelityVector F;
    for (const auto &[y, a] : alpha) {
        auto Ry = build_R_single(M, N, d, y);
        F[y] = top.vector.amplitudes.dot(Ry.data * top.vector.amplitudes).real();
    }
    j["fidelities"] = to_json(F);
    if (alpha_path.empty()) j["symmetric_value"] = to_string(symmetric_fidelity(M, L, N, d));
    std::cout << j.dump(2) << '\n';
    return 0;
}

void region_one_to_n(std::ostream &out, int N, int d, int grid) {
    if (N < 2) throw CLI::ValidationError("--N", "must be at least 2");
    const double lo = 1.0 / (d + 1);
    for (int n = 1; n <= N; ++n) out << "F_" << n << ',';
    out << "achievable\n";
    std::vector<int> idx(N - 1, 0);
    while (true) {
        std::vector<double> known;
        for (int i : idx) known.push_back(lo + (1 - lo) * i / (grid - 1));
        std::string last = "nan";
        int ok = 0;
        try {
            last = format_double(tradeoff_1_to_N(N, d, known));
            ok = 1;
        } catch (const std::domain_error &) {
        }
        for (double f : known) out << format_double(f) << ',';
        out << last << ',' << ok << '\n';
        int k = N - 2;
        while (k >= 0 && ++idx[k] == grid) idx[k--] = 0;
        if (k < 0) break;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Universal quantum-cloning fidelity trade-offs"};
    app.require_subcommand(1);

    int M = 1, N = 2, L = 1, d = 2, grid = 50, gL = -1;
    std::string y, alpha_path, targets_path, mode, model = "exact", output, scope = "fast";

    auto *symfid = app.add_subcommand("symfid", "symmetric optimal fidelity, exact and decimal");
    for (auto *sc : {symfid}) {
        sc->add_option("--M", M)->required()->check(CLI::PositiveNumber);
        sc->add_option("--N", N)->required()->check(CLI::PositiveNumber);
        sc->add_option("--L", L)->required()->check(CLI::PositiveNumber);
        sc->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    }

    auto *gram = app.add_subcommand("gram", "Gram matrix G_y (or G^(M,L)_y with --L) as JSON");
    gram->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    gram->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    gram->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    gram->add_option("--y", y, "bit string; default all zeros");
    gram->add_option("--L", gL)->check(CLI::NonNegativeNumber);

    auto *oracle = app.add_subcommand("oracle", "dense Choi-operator optimum as JSON");
    oracle->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    oracle->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    oracle->add_option("--L", L)->required()->check(CLI::PositiveNumber);
    oracle->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    oracle->add_option("--alpha", alpha_path, "JSON weights {y: alpha_y}; default uniform")->check(CLI::ExistingFile);

    auto *check = app.add_subcommand("check", "feasibility of a fidelity target file");
    check->add_option("targets", targets_path)->required();

    auto *region = app.add_subcommand("region", "sweep a region to CSV");
    region->add_option("--mode", mode)->required()->check(CLI::IsMember({"one-to-n", "2to4"}));
    region->add_option("--grid", grid)->check(CLI::Range(2, 100000));
    region->add_option("--N", N)->check(CLI::Range(2, 8));
    region->add_option("--d", d)->check(CLI::Range(2, 64));
    region->add_option("--model", model)->check(CLI::IsMember({"exact", "printed"}));
    region->add_option("--output", output);

    auto *verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--scope", scope)->check(CLI::IsMember({"fast", "full"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*symfid) return cmd_symfid(M, N, L, d);
        if (*gram) {
            if (y.empty()) y = std::string(N, '0');
            return cmd_gram(M, N, d, y, gL);
        }
        if (*oracle) return cmd_oracle(M, N, d, L, alpha_path);
        if (*check) return cmd_check(targets_path);
        if (*region) {
            std::ofstream file;
            if (!output.empty()) {
                file.open(output);
                if (!file) throw std::runtime_error("cannot write " + output);
            }
            std::ostream &out = output.empty() ? std::cout : file;
            if (mode == "2to4")
                write_region_csv(out, grid, model == "exact" ? CaseModel::Exact : CaseModel::Printed);
            else
                region_one_to_n(out, N, d, grid);
            out.flush();
            if (!out) throw std::runtime_error("write failed");
            return 0;
        }
        if (*verify) {
            auto results = run_acceptance(scope, &std::cout);
            std::vector<std::string> failing;
            for (const auto &r : results)
                if (!r.pass) failing.push_back(std::to_string(r.id) + " (" + r.name + ")");
            if (failing.empty()) {
                std::cout << "all " << results.size() << " criteria pass\n";
                return 0;
            }
            std::cout << "failing criteria:";
            for (const auto &f : failing) std::cout << ' ' << f << ';';
            std::cout << '\n';
            return 1;
        }
    } catch (const CLI::Error &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return 0;
}
