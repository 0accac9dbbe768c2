#include "prdm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prdm::lp {

const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

constexpr double kZeroTol = 1e-11;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tableau layout: rows 0..m-1 are constraints, row m is the reduced-cost row.
// Columns 0..n-1 are structural, n..n+m-1 artificial, n+m is the right-hand side.
class Tableau {
public:
    Tableau(const Problem& p, const Options& opt) : m_(p.a.rows()), n_(p.a.cols()), opt_(opt) {
        t_ = RowMatrix::Zero(m_ + 1, n_ + m_ + 1);
        sign_.assign(static_cast<std::size_t>(m_), 1.0);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double s = p.b[i] < 0.0 ? -1.0 : 1.0;
            sign_[static_cast<std::size_t>(i)] = s;
            t_.block(i, 0, 1, n_) = s * p.a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, n_ + m_) = s * p.b[i];
        }
        b_ = t_.col(n_ + m_).head(m_);
        // Distinct positive shifts per row; the golden-ratio sequence keeps them
        // away from any small rational combination.
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double frac = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
            t_(i, n_ + m_) += opt_.rhs_perturbation * (1.0 + frac);
        }
        basis_.resize(static_cast<std::size_t>(m_));
        for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    }

    // Reduced-cost row for `cost` (indexed over structural then artificial columns).
    void set_objective(const Eigen::VectorXd& cost) {
        t_.row(m_).setZero();
        t_.block(m_, 0, 1, cost.size()) = cost.transpose();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double cb = basis_[static_cast<std::size_t>(i)] < cost.size() ? cost[basis_[static_cast<std::size_t>(i)]] : 0.0;
            if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
        }
    }

    // Runs simplex iterations allowing entering columns < `allowed`. A
    // nonnegative objective (phase 1) is optimal as soon as it reaches `floor`.
    Status run(Eigen::Index allowed, int& iterations, double floor = -std::numeric_limits<double>::infinity()) {
        int degenerate_run = 0;
        for (;;) {
            if (rhs_objective() <= floor) return Status::optimal;
            Eigen::Index enter = -1;
            const bool bland = opt_.dantzig_until_stall <= 0 || degenerate_run >= opt_.dantzig_until_stall;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (t_(m_, j) < -opt_.pivot_tol) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (enter < 0 || t_(m_, j) < t_(m_, enter)) enter = j;
                }
            }
            if (enter < 0) return Status::optimal;
            if (iterations >= opt_.max_iterations) return Status::iteration_limit;

            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double a = t_(i, enter);
                if (a > opt_.pivot_tol) best = std::min(best, t_(i, n_ + m_) / a);
            }
            Eigen::Index leave = -1;
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double a = t_(i, enter);
                if (a <= opt_.pivot_tol || t_(i, n_ + m_) / a > best + 1e-12) continue;
                if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
            }
            if (leave < 0) return Status::unbounded;
            degenerate_run = best * std::abs(t_(m_, enter)) > kZeroTol ? 0 : degenerate_run + 1;
            pivot(leave, enter);
            ++iterations;
        }
    }

    // Entries below zero_tol are flushed after every pivot so that degenerate
    // ties stay exact and round-off cannot drive basic values negative.
    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        t_(row, col) = 1.0;
        for (Eigen::Index i = 0; i <= m_; ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f == 0.0) continue;
            auto r = t_.row(i);
            r -= f * t_.row(row);
            r = (r.array().abs() < kZeroTol).select(0.0, r);
            t_(i, col) = 0.0;
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // After phase 1, pivots zero-level artificials out of the basis where
    // possible. Rows where that fails are linearly dependent and are cleared.
    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            Eigen::Index col = -1;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (std::abs(t_(i, j)) > opt_.pivot_tol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                pivot(i, col);
            } else {
                t_.block(i, 0, 1, n_).setZero();
                t_(i, n_ + m_) = 0.0;
            }
        }
    }

    // Replaces the right-hand side by B^{-1} b for the unperturbed b; the
    // artificial columns hold B^{-1}. Returns the most negative basic value.
    double restore_rhs() {
        double lowest = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            double v = t_.row(i).segment(n_, m_).dot(b_);
            if (std::abs(v) < kZeroTol) v = 0.0;
            t_(i, n_ + m_) = v;
            lowest = std::min(lowest, v);
        }
        return lowest;
    }

    double rhs_objective() const { return -t_(m_, n_ + m_); }

    Eigen::VectorXd primal() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const auto j = basis_[static_cast<std::size_t>(i)];
            if (j < n_) x[j] = t_(i, n_ + m_);
        }
        return x;
    }

    // With zero phase-2 cost on artificial column i, its reduced cost is -y_i
    // for the sign-normalized row; undo the normalization.
    Eigen::VectorXd dual() const {
        Eigen::VectorXd y(m_);
        for (Eigen::Index i = 0; i < m_; ++i) y[i] = -t_(m_, n_ + i) * sign_[static_cast<std::size_t>(i)];
        return y;
    }

private:
    Eigen::Index m_, n_;
    Options opt_;
    RowMatrix t_;
    std::vector<double> sign_;
    Eigen::VectorXd b_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

Result solve(const Problem& p, const Options& opt) {
    const auto m = p.a.rows();
    const auto n = p.a.cols();
    if (p.b.size() != m || p.c.size() != n) throw std::invalid_argument("lp::solve: inconsistent problem dimensions");

    Result r;
    Tableau tab(p, opt);

    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    tab.set_objective(phase1);
    Status s = tab.run(n, r.iterations, 0.0);
    if (s == Status::iteration_limit) {
        r.status = s;
        r.x = tab.primal();
        return r;
    }
    if (tab.rhs_objective() > opt.feasibility_tol * std::max<double>(1.0, static_cast<double>(m))) {
        if (opt.rhs_perturbation != 0.0) {
            Options plain = opt;
            plain.rhs_perturbation = 0.0;
            return solve(p, plain);
        }
        r.status = Status::infeasible;
        return r;
    }
    tab.drive_out_artificials();

    tab.set_objective(p.c);
    s = tab.run(n, r.iterations);
    if (opt.rhs_perturbation != 0.0 && s == Status::optimal) {
        if (tab.restore_rhs() < -opt.feasibility_tol) {
            // The perturbed optimum is not a feasible basis for the original data.
            Options plain = opt;
            plain.rhs_perturbation = 0.0;
            Result retry = solve(p, plain);
            retry.iterations += r.iterations;
            return retry;
        }
        tab.set_objective(p.c);
    }
    r.status = s;
    r.x = tab.primal();
    r.objective = p.c.dot(r.x);
    if (s == Status::optimal) r.y = tab.dual();
    return r;
}

}  // namespace prdm::lp
