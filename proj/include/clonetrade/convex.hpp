#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace clonetrade {

// A_eq x = b_eq, A_in x >= b_in, lower <= x <= upper (box vectors may be empty).
struct LinearConstraints {
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd A_in;
    Eigen::VectorXd b_in;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    explicit LinearConstraints(Eigen::Index n = 0);
    Eigen::Index dimension() const { return n_; }
    void add_equality(const Eigen::VectorXd &a, double b);
    void add_inequality(const Eigen::VectorXd &a, double b);
    // Largest violation of any constraint at x (0 when feasible).
    double violation(const Eigen::VectorXd &x) const;

  private:
    Eigen::Index n_;
};

enum class SolveStatus { Optimal, Infeasible, NotConverged };
std::string to_string(SolveStatus s);

struct QPResult {
    SolveStatus status = SolveStatus::Infeasible;
    Eigen::VectorXd x;
    double value = 0;
};

// min 1/2 x'Hx + g'x subject to the constraints; H symmetric positive definite.
// Goldfarb-Idnani dual active-set method.
QPResult solve_qp(const Eigen::MatrixXd &H, const Eigen::VectorXd &g, const LinearConstraints &c);

// Euclidean projection onto the constraint polytope.
QPResult project(const Eigen::VectorXd &z, const LinearConstraints &c);

struct Objective {
    std::function<double(const Eigen::VectorXd &)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd &)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd &)> hessian;  // optional
};

struct ConvexOptions {
    double tolerance = 1e-10;
    int max_iterations = 100000;
};

struct ConvexResult {
    SolveStatus status = SolveStatus::Infeasible;
    double optimum = 0;
    Eigen::VectorXd argument;
    int iterations = 0;
    double projected_gradient = 0;
};

// Projected (Newton-scaled) gradient descent with Armijo backtracking.
// Deterministic: the start is the projection of x0 (or of the origin).
ConvexResult convex_minimize(const Objective &f, const LinearConstraints &c, const Eigen::VectorXd &x0 = {},
                             const ConvexOptions &opt = {});

}  // namespace clonetrade
