#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "prdm/rng.hpp"
#include "prdm/simplex.hpp"

using namespace prdm::lp;

namespace {

// Best basic feasible solution found by trying every column subset of size
// rows(A); valid for full-row-rank, bounded problems.
double brute_force_optimum(const Problem& p) {
    const int m = static_cast<int>(p.a.rows()), n = static_cast<int>(p.a.cols());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            Eigen::MatrixXd b(m, m);
            for (int j = 0; j < m; ++j) b.col(j) = p.a.col(idx[static_cast<std::size_t>(j)]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
            if (lu.rank() < m) return;
            const Eigen::VectorXd xb = lu.solve(p.b);
            if (xb.minCoeff() < -1e-9) return;
            double obj = 0.0;
            for (int j = 0; j < m; ++j) obj += p.c(idx[static_cast<std::size_t>(j)]) * xb(j);
            best = std::min(best, obj);
            return;
        }
        for (int j = start; j < n; ++j) {
            idx[static_cast<std::size_t>(depth)] = j;
            rec(j + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("textbook problem") {
    // min -x - y  s.t.  x + 2y + s1 = 4, 3x + y + s2 = 6
    Problem p;
    p.a.resize(2, 4);
    p.a << 1, 2, 1, 0, 3, 1, 0, 1;
    p.b.resize(2);
    p.b << 4, 6;
    p.c.resize(4);
    p.c << -1, -1, 0, 0;
    const auto r = solve(p);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(-2.8));
    CHECK(r.x(0) == doctest::Approx(1.6));
    CHECK(r.x(1) == doctest::Approx(1.2));
    // Strong duality: b.y equals the optimum and A^T y <= c.
    CHECK(p.b.dot(r.y) == doctest::Approx(r.objective));
    CHECK(((p.a.transpose() * r.y) - p.c).maxCoeff() <= 1e-9);
}

TEST_CASE("infeasible and unbounded problems") {
    Problem inf;
    inf.a.resize(2, 2);
    inf.a << 1, 1, 1, 1;
    inf.b.resize(2);
    inf.b << 1, 2;
    inf.c = Eigen::VectorXd::Zero(2);
    CHECK(solve(inf).status == Status::infeasible);

    Problem unb;
    unb.a.resize(1, 2);
    unb.a << 1, -1;
    unb.b.resize(1);
    unb.b << 1;
    unb.c.resize(2);
    unb.c << -1, 0;
    CHECK(solve(unb).status == Status::unbounded);
}

TEST_CASE("negative right-hand sides and redundant rows") {
    Problem p;
    p.a.resize(3, 3);
    p.a << 1, 1, 1, -1, 0, 1, 2, 2, 2;
    p.b.resize(3);
    p.b << 1, -0.5, 2;
    p.c.resize(3);
    p.c << 1, 2, 3;
    const auto r = solve(p);
    REQUIRE(r.status == Status::optimal);
    CHECK((p.a * r.x - p.b).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.x.minCoeff() >= -1e-12);
    CHECK(r.objective == doctest::Approx(1.5));
}

TEST_CASE("iteration limit is reported") {
    Problem p;
    p.a.resize(2, 4);
    p.a << 1, 2, 1, 0, 3, 1, 0, 1;
    p.b.resize(2);
    p.b << 4, 6;
    p.c.resize(4);
    p.c << -1, -1, 0, 0;
    Options o;
    o.max_iterations = 1;
    CHECK(solve(p, o).status == Status::iteration_limit);
}

TEST_CASE("random problems agree with basis enumeration") {
    prdm::Rng rng(prdm::RngSeed{17, 0});
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 3, n = 7;
        Problem p;
        p.a.resize(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) p.a(i, j) = std::floor(rng.uniform() * 7.0) - 2.0;
        // b = A x0 for a nonnegative x0 keeps the problem feasible; positive
        // costs keep it bounded.
        Eigen::VectorXd x0(n);
        for (int j = 0; j < n; ++j) x0(j) = std::floor(rng.uniform() * 3.0);
        if (Eigen::FullPivLU<Eigen::MatrixXd>(p.a).rank() < m) continue;
        p.b = p.a * x0;
        p.c.resize(n);
        for (int j = 0; j < n; ++j) p.c(j) = 1.0 + std::floor(rng.uniform() * 5.0);
        const double best = brute_force_optimum(p);
        for (const auto& opt : {Options{}, degenerate_options()}) {
            const auto r = solve(p, opt);
            REQUIRE(r.status == Status::optimal);
            CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
            CHECK((p.a * r.x - p.b).cwiseAbs().maxCoeff() < 1e-8);
            CHECK(r.x.minCoeff() >= 0.0);
            CHECK(p.b.dot(r.y) == doctest::Approx(r.objective).epsilon(1e-8));
        }
    }
}
