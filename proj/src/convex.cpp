#include "clonetrade/convex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace clonetrade {

LinearConstraints::LinearConstraints(Eigen::Index n)
    : A_eq(0, n), b_eq(0), A_in(0, n), b_in(0), n_(n) {}

void LinearConstraints::add_equality(const Eigen::VectorXd &a, double b) {
    A_eq.conservativeResize(A_eq.rows() + 1, n_);
    A_eq.row(A_eq.rows() - 1) = a.transpose();
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq(b_eq.size() - 1) = b;
}

void LinearConstraints::add_inequality(const Eigen::VectorXd &a, double b) {
    A_in.conservativeResize(A_in.rows() + 1, n_);
    A_in.row(A_in.rows() - 1) = a.transpose();
    b_in.conservativeResize(b_in.size() + 1);
    b_in(b_in.size() - 1) = b;
}

double LinearConstraints::violation(const Eigen::VectorXd &x) const {
    double v = 0;
    if (A_eq.rows()) v = std::max(v, (A_eq * x - b_eq).cwiseAbs().maxCoeff());
    if (A_in.rows()) v = std::max(v, (b_in - A_in * x).maxCoeff());
    if (lower.size()) v = std::max(v, (lower - x).maxCoeff());
    if (upper.size()) v = std::max(v, (x - upper).maxCoeff());
    return std::max(v, 0.0);
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NotConverged: return "not_converged";
    }
    return "unknown";
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct ActiveSet {
    Eigen::Index n;
    Eigen::MatrixXd J;
    Eigen::MatrixXd R;
    std::vector<int> A;
    Eigen::VectorXd u;
    int iq = 0;
    double R_norm = 1;

    void compute_z(const Eigen::VectorXd &d, Eigen::VectorXd &z) const {
        z = J.rightCols(n - iq) * d.tail(n - iq);
    }

    void compute_r(const Eigen::VectorXd &d, Eigen::VectorXd &r) const {
        for (int i = iq - 1; i >= 0; --i) {
            double sum = d(i);
            for (int j = i + 1; j < iq; ++j) sum -= R(i, j) * r(j);
            r(i) = sum / R(i, i);
        }
    }

    bool add(Eigen::VectorXd &d) {
        for (Eigen::Index j = n - 1; j >= iq + 1; --j) {
            double cc = d(j - 1), ss = d(j);
            double h = std::hypot(cc, ss);
            if (h == 0) continue;
            d(j) = 0;
            ss /= h;
            cc /= h;
            if (cc < 0) {
                cc = -cc;
                ss = -ss;
                d(j - 1) = -h;
            } else {
                d(j - 1) = h;
            }
            double xny = ss / (1 + cc);
            for (Eigen::Index k = 0; k < n; ++k) {
                double t1 = J(k, j - 1), t2 = J(k, j);
                J(k, j - 1) = t1 * cc + t2 * ss;
                J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
            }
        }
        ++iq;
        for (int i = 0; i < iq; ++i) R(i, iq - 1) = d(i);
        if (std::abs(d(iq - 1)) <= std::numeric_limits<double>::epsilon() * R_norm) return false;
        R_norm = std::max(R_norm, std::abs(d(iq - 1)));
        return true;
    }

    void remove(int p, int l) {
        int qq = -1;
        for (int i = p; i < iq; ++i) {
            if (A[i] == l) {
                qq = i;
                break;
            }
        }
        if (qq < 0) throw std::logic_error("constraint not in active set");
        for (int i = qq; i < iq - 1; ++i) {
            A[i] = A[i + 1];
            u(i) = u(i + 1);
            R.col(i) = R.col(i + 1);
        }
        A[iq - 1] = A[iq];
        u(iq - 1) = u(iq);
        A[iq] = 0;
        u(iq) = 0;
        for (int j = 0; j < iq; ++j) R(j, iq - 1) = 0;
        --iq;
        if (iq == 0) return;
        for (int j = qq; j < iq; ++j) {
            double cc = R(j, j), ss = R(j + 1, j);
            double h = std::hypot(cc, ss);
            if (h == 0) continue;
            cc /= h;
            ss /= h;
            R(j + 1, j) = 0;
            if (cc < 0) {
                R(j, j) = -h;
                cc = -cc;
                ss = -ss;
            } else {
                R(j, j) = h;
            }
            double xny = ss / (1 + cc);
            for (int k = j + 1; k < iq; ++k) {
                double t1 = R(j, k), t2 = R(j + 1, k);
                R(j, k) = t1 * cc + t2 * ss;
                R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                double t1 = J(k, j), t2 = J(k, j + 1);
                J(k, j) = t1 * cc + t2 * ss;
                J(k, j + 1) = xny * (J(k, j) + t1) - t2;
            }
        }
    }
};

}  // namespace

QPResult solve_qp(const Eigen::MatrixXd &H, const Eigen::VectorXd &g, const LinearConstraints &c) {
    const Eigen::Index n = g.size();
    if (H.rows() != n || H.cols() != n || c.dimension() != n) throw std::invalid_argument("QP dimension mismatch");

    // Columns are constraint normals: CE' x + ce0 = 0, CI' x + ci0 >= 0.
    const Eigen::Index p = c.A_eq.rows();
    Eigen::MatrixXd CE = c.A_eq.transpose();
    Eigen::VectorXd ce0 = -c.b_eq;
    std::vector<Eigen::VectorXd> ci_cols;
    std::vector<double> ci0;
    for (Eigen::Index i = 0; i < c.A_in.rows(); ++i) {
        ci_cols.push_back(c.A_in.row(i).transpose());
        ci0.push_back(-c.b_in(i));
    }
    for (Eigen::Index i = 0; i < c.lower.size(); ++i) {
        if (!std::isfinite(c.lower(i))) continue;
        ci_cols.push_back(Eigen::VectorXd::Unit(n, i));
        ci0.push_back(-c.lower(i));
    }
    for (Eigen::Index i = 0; i < c.upper.size(); ++i) {
        if (!std::isfinite(c.upper(i))) continue;
        ci_cols.push_back(-Eigen::VectorXd::Unit(n, i));
        ci0.push_back(c.upper(i));
    }
    const int m = static_cast<int>(ci_cols.size());

    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("QP Hessian is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    const double c1 = H.trace();

    ActiveSet as;
    as.n = n;
    as.J = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    const double c2 = as.J.trace();
    as.R = Eigen::MatrixXd::Zero(n, n);
    as.A.assign(n + m + p + 1, 0);
    as.u = Eigen::VectorXd::Zero(n + m + p + 1);

    Eigen::VectorXd x = -llt.solve(g);
    Eigen::VectorXd d(n), z(n), r(n + 1), np(n);
    r.setZero();
    QPResult res;

    auto finish = [&](SolveStatus st) {
        res.status = st;
        res.x = x;
        res.value = 0.5 * x.dot(H * x) + g.dot(x);
        return res;
    };

    for (Eigen::Index i = 0; i < p; ++i) {
        np = CE.col(i);
        d = as.J.transpose() * np;
        as.compute_z(d, z);
        as.compute_r(d, r);
        double t2 = 0;
        if (std::abs(z.dot(z)) > std::numeric_limits<double>::epsilon()) t2 = (-np.dot(x) - ce0(i)) / z.dot(np);
        x += t2 * z;
        as.u(as.iq) = t2;
        for (int k = 0; k < as.iq; ++k) as.u(k) -= t2 * r(k);
        as.A[as.iq] = -static_cast<int>(i) - 1;
        if (!as.add(d)) {
            // Dependent equality: consistent iff already satisfied.
            --as.iq;
            if (std::abs(np.dot(x) + ce0(i)) > 1e-9 * std::max(1.0, np.norm())) return finish(SolveStatus::Infeasible);
            for (int k = 0; k < as.iq + 1; ++k) as.R(k, as.iq) = 0;
        }
    }
    for (Eigen::Index i = 0; i < p; ++i) {
        if (std::abs(CE.col(i).dot(x) + ce0(i)) > 1e-9 * std::max(1.0, CE.col(i).norm())) {
            return finish(SolveStatus::Infeasible);
        }
    }
    const int p_active = as.iq;

    std::vector<int> iai(m), A_old(n + m + p + 1);
    std::vector<bool> iaexcl(m, true);
    Eigen::VectorXd s(m), u_old(n + m + p + 1), x_old(n);
    for (int i = 0; i < m; ++i) iai[i] = i;

    const int max_iter = 50 * (m + static_cast<int>(n) + 10);
    int iter = 0;
    int ip = 0;
    while (true) {
        // step 1: choose a violated constraint
        if (++iter > max_iter) return finish(SolveStatus::NotConverged);
        for (int i = p_active; i < as.iq; ++i) iai[as.A[i]] = -1;
        double psi = 0;
        for (int i = 0; i < m; ++i) {
            iaexcl[i] = true;
            s(i) = ci_cols[i].dot(x) + ci0[i];
            psi += std::min(0.0, s(i));
        }
        if (std::abs(psi) <= m * std::numeric_limits<double>::epsilon() * c1 * c2 * 100.0) {
            return finish(SolveStatus::Optimal);
        }
        for (int i = 0; i < as.iq; ++i) {
            u_old(i) = as.u(i);
            A_old[i] = as.A[i];
        }
        x_old = x;

    choose:
        {
            double ss = 0;
            for (int i = 0; i < m; ++i) {
                if (s(i) < ss && iai[i] != -1 && iaexcl[i]) {
                    ss = s(i);
                    ip = i;
                }
            }
            if (ss >= 0) return finish(SolveStatus::Optimal);
            np = ci_cols[ip];
            as.u(as.iq) = 0;
            as.A[as.iq] = ip;
        }

        while (true) {
            // step 2: search direction
            if (++iter > max_iter) return finish(SolveStatus::NotConverged);
            d = as.J.transpose() * np;
            as.compute_z(d, z);
            as.compute_r(d, r);
            int l = 0;
            double t1 = inf;
            for (int k = p_active; k < as.iq; ++k) {
                if (r(k) > 0 && as.u(k) / r(k) < t1) {
                    t1 = as.u(k) / r(k);
                    l = as.A[k];
                }
            }
            double t2 = std::abs(z.dot(z)) > std::numeric_limits<double>::epsilon() ? -s(ip) / z.dot(np) : inf;
            double t = std::min(t1, t2);
            if (t >= inf) return finish(SolveStatus::Infeasible);
            if (t2 >= inf) {
                for (int k = 0; k < as.iq; ++k) as.u(k) -= t * r(k);
                as.u(as.iq) += t;
                iai[l] = l;
                as.remove(p_active, l);
                continue;
            }
            x += t * z;
            for (int k = 0; k < as.iq; ++k) as.u(k) -= t * r(k);
            as.u(as.iq) += t;
            if (t == t2) {
                if (!as.add(d)) {
                    iaexcl[ip] = false;
                    as.remove(p_active, ip);
                    for (int i = 0; i < m; ++i) iai[i] = i;
                    for (int i = p_active; i < as.iq; ++i) {
                        as.A[i] = A_old[i];
                        as.u(i) = u_old(i);
                        iai[as.A[i]] = -1;
                    }
                    x = x_old;
                    goto choose;
                }
                iai[ip] = -1;
                break;
            }
            iai[l] = l;
            as.remove(p_active, l);
            s(ip) = ci_cols[ip].dot(x) + ci0[ip];
        }
    }
}

QPResult project(const Eigen::VectorXd &z, const LinearConstraints &c) {
    return solve_qp(Eigen::MatrixXd::Identity(z.size(), z.size()), -z, c);
}

ConvexResult convex_minimize(const Objective &f, const LinearConstraints &c, const Eigen::VectorXd &x0,
                             const ConvexOptions &opt) {
    const Eigen::Index n = c.dimension();
    ConvexResult out;
    Eigen::VectorXd start = x0.size() == n ? x0 : Eigen::VectorXd::Zero(n);
    auto p0 = project(start, c);
    if (p0.status != SolveStatus::Optimal || c.violation(p0.x) > 1e-8) {
        out.status = SolveStatus::Infeasible;
        return out;
    }
    Eigen::VectorXd x = p0.x;
    double fx = f.value(x);

    auto pg_norm = [&](const Eigen::VectorXd &pt, const Eigen::VectorXd &grad) {
        auto pr = project(pt - grad, c);
        return pr.status == SolveStatus::Optimal ? (pt - pr.x).norm() : inf;
    };

    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::VectorXd grad = f.gradient(x);
        double pg = pg_norm(x, grad);
        out.iterations = it;
        out.projected_gradient = pg;
        if (pg <= opt.tolerance) {
            out.status = SolveStatus::Optimal;
            out.optimum = fx;
            out.argument = x;
            return out;
        }
        Eigen::MatrixXd Hm;
        if (f.hessian) {
            Hm = f.hessian(x);
            Hm = 0.5 * (Hm + Hm.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
            Eigen::VectorXd ev = es.eigenvalues();
            double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
            double floor = 1e-8 * top;
            for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), floor);
            Hm = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        } else {
            Hm = Eigen::MatrixXd::Identity(n, n);
        }
        auto qp = solve_qp(Hm, grad - Hm * x, c);
        Eigen::VectorXd dir;
        if (qp.status == SolveStatus::Optimal) {
            dir = qp.x - x;
        } else {
            auto pr = project(x - grad, c);
            if (pr.status != SolveStatus::Optimal) break;
            dir = pr.x - x;
        }
        double slope = grad.dot(dir);
        if (slope >= 0 || dir.norm() < 1e-15) {
            // No descent available at working precision.
            out.status = pg <= 1e3 * opt.tolerance ? SolveStatus::Optimal : SolveStatus::NotConverged;
            out.optimum = fx;
            out.argument = x;
            return out;
        }
        double t = 1.0;
        double fn = f.value(x + dir);
        int halvings = 0;
        while (!(fn <= fx + 1e-4 * t * slope) && halvings < 60) {
            t *= 0.5;
            fn = f.value(x + t * dir);
            ++halvings;
        }
        if (halvings == 60) {
            out.status = pg <= 1e3 * opt.tolerance ? SolveStatus::Optimal : SolveStatus::NotConverged;
            out.optimum = fx;
            out.argument = x;
            return out;
        }
        x += t * dir;
        fx = fn;
    }
    out.status = SolveStatus::NotConverged;
    out.optimum = fx;
    out.argument = x;
    return out;
}

}  // namespace clonetrade
