// Dense two-phase simplex for small standard-form linear programs:
//   minimize c^T x  subject to  A x = b,  x >= 0.

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace prdm::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status s);

struct Problem {
    Eigen::MatrixXd a;  // rows = constraints, cols = variables
    Eigen::VectorXd b;
    Eigen::VectorXd c;
};

struct Options {
    int max_iterations = 50000;
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-9;
    /// 0: pure Bland pricing. K > 0: most negative reduced cost, falling back
    /// to Bland's rule after K consecutive degenerate pivots until progress resumes.
    int dantzig_until_stall = 0;
    /// Positive shift added to every right-hand side during the solve; the
    /// final basis is re-evaluated on the original b (re-solved unperturbed
    /// if that basis is infeasible).
    double rhs_perturbation = 0.0;
};

/// Settings for the highly degenerate stabilizer-decomposition programs.
inline Options degenerate_options() {
    Options o;
    o.dantzig_until_stall = 50;
    o.rhs_perturbation = 1e-7;
    return o;
}

struct Result {
    Status status = Status::iteration_limit;
    Eigen::VectorXd x;
    /// Dual multipliers y with A^T y <= c (meaningful when optimal).
    Eigen::VectorXd y;
    double objective = 0.0;
    int iterations = 0;
};

/// Bland's rule picks the leaving variable (and the entering one when pricing
/// is pure Bland or stalled), so the method terminates without cycling and is
/// deterministic.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace prdm::lp
