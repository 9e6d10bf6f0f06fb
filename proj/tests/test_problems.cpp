#include "pdegreedy/problems.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"

using namespace pdegreedy;
using std::numbers::pi;

TEST_CASE("builtin data fields match the manufactured solutions") {
    const auto& poisson2 = find_problem("poisson_2d");
    CHECK(poisson2.pieces[0].data.eval(0.5, 0.5) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
    CHECK(poisson2.pieces[1].data.eval(0.0, 0.37) == 0.0);
    CHECK(poisson2.pieces[1].data.eval(1.0, 0.9) == 0.0);

    const auto& poisson1 = find_problem("poisson_1d");
    CHECK(poisson1.pieces[0].data.eval(0.5, 0.0) == doctest::Approx(pi * pi).epsilon(1e-14));

    RadialKernel k(5, 1.0);
    for (const auto& spec : builtin_problems()) CHECK_NOTHROW(validate_problem(spec, k));
    CHECK_THROWS_AS(find_problem("no_such_problem"), std::invalid_argument);
}

TEST_CASE("validation rejects inconsistent data and insufficient smoothness") {
    ProblemSpec bad = find_problem("poisson_1d");
    bad.pieces[0].data = Expr::parse("pi*pi*sin(pi*x) + 0.001");
    CHECK_THROWS_AS(validate_problem(bad, RadialKernel(5, 1.0)), std::invalid_argument);

    // nu = 3/2 gives tau = 2 in 1d, not above m + d/2 = 2.5 on the PDE piece
    CHECK_THROWS_AS(validate_problem(find_problem("poisson_1d"), RadialKernel(3, 1.0)),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_problem(find_problem("interp_1d"), RadialKernel(3, 1.0)));
}

TEST_CASE("candidate generation is deterministic, distinct, and in-region") {
    const auto& spec = find_problem("poisson_2d");
    const int counts[] = {40, 16};
    auto a = generate_candidates(spec, counts, 7);
    auto b = generate_candidates(spec, counts, 7);
    REQUIRE(a.size() == 56);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.functionals[i].id == b.functionals[i].id);
        CHECK(a.functionals[i].point == b.functionals[i].point);  // bitwise
        CHECK(a.functionals[i].domain_index == b.functionals[i].domain_index);
    }
    auto c = generate_candidates(spec, counts, 8);
    bool any_moved = false;
    for (std::size_t i = 0; i < 40; ++i)
        if (c.functionals[i].point != a.functionals[i].point) any_moved = true;
    CHECK(any_moved);

    std::set<std::pair<double, double>> interior;
    for (int i = 0; i < 40; ++i) {
        const auto& f = a.functionals[i];
        CHECK(f.domain_index == 1);
        CHECK(f.op == OperatorTag::NegLaplacian);
        CHECK(f.point[0] > 0.0);
        CHECK(f.point[0] < 1.0);
        CHECK(f.point[1] > 0.0);
        CHECK(f.point[1] < 1.0);
        interior.emplace(f.point[0], f.point[1]);
    }
    CHECK(interior.size() == 40);  // pairwise distinct

    // boundary points cover all four edges, corners at most once
    int on_edge[4] = {0, 0, 0, 0};
    std::set<std::pair<double, double>> boundary;
    for (int i = 40; i < 56; ++i) {
        const auto& f = a.functionals[i];
        CHECK(f.op == OperatorTag::Identity);
        boundary.emplace(f.point[0], f.point[1]);
        if (f.point[1] == 0.0) ++on_edge[0];
        if (f.point[0] == 1.0) ++on_edge[1];
        if (f.point[1] == 1.0) ++on_edge[2];
        if (f.point[0] == 0.0) ++on_edge[3];
    }
    CHECK(boundary.size() == 16);
    for (int e = 0; e < 4; ++e) CHECK(on_edge[e] >= 2);

    // ids are the global ordinal
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.functionals[i].id == i);
}

TEST_CASE("interval candidates stay strictly inside and endpoint pieces cap at 2") {
    const auto& spec = find_problem("poisson_1d");
    int counts[] = {5, 2};
    auto cs = generate_candidates(spec, counts, 0);
    REQUIRE(cs.size() == 7);
    std::set<double> xs;
    for (int i = 0; i < 5; ++i) {
        CHECK(cs.functionals[i].point[0] > 0.0);
        CHECK(cs.functionals[i].point[0] < 1.0);
        xs.insert(cs.functionals[i].point[0]);
    }
    CHECK(xs.size() == 5);
    CHECK(cs.functionals[5].point[0] == 0.0);
    CHECK(cs.functionals[6].point[0] == 1.0);

    int too_many[] = {5, 3};
    CHECK_THROWS_AS(generate_candidates(spec, too_many, 0), std::invalid_argument);
    int zero[] = {0, 2};
    CHECK_THROWS_AS(generate_candidates(spec, zero, 0), std::invalid_argument);
    int short_counts[] = {5};
    CHECK_THROWS_AS(generate_candidates(spec, short_counts, 0), std::invalid_argument);
}

TEST_CASE("rate predictions reproduce the closed-form exponents") {
    // poisson_2d, nu = 5/2: tau = 3.5, interior (3.5-2)/2, boundary 3.5/1
    auto rp = predicted_exponent(find_problem("poisson_2d"), RadialKernel(5, 1.0), 1.0);
    CHECK(rp.tau == doctest::Approx(3.5));
    REQUIRE(rp.per_piece.size() == 2);
    CHECK(rp.per_piece[0].exponent == doctest::Approx(0.75));
    CHECK(rp.per_piece[1].exponent == doctest::Approx(3.5));
    CHECK(rp.m_bar == doctest::Approx(2.0));
    CHECK(rp.d_bar == doctest::Approx(2.0));
    CHECK(rp.predicted_exponent == doctest::Approx(-0.75));
    CHECK(rp.pn_exponent == doctest::Approx(-0.25));
    // boundary piece reports the trace-order alternative as well
    REQUIRE(rp.per_piece[1].trace_order.has_value());
    CHECK(*rp.per_piece[1].trace_order == doctest::Approx(0.5));
    CHECK(*rp.per_piece[1].trace_exponent == doctest::Approx(3.0));

    // interp_1d, nu = 5/2: tau = 3, beta = 0 -> -3 + 1/2
    auto ri = predicted_exponent(find_problem("interp_1d"), RadialKernel(5, 1.0), 0.0);
    CHECK(ri.predicted_exponent == doctest::Approx(-2.5));
    CHECK(ri.m_bar == doctest::Approx(0.0));
    CHECK(ri.d_bar == doctest::Approx(1.0));

    // beta = 0 vs beta = 1 differ by exactly 1/2 at fixed tau, m, d
    auto r0 = predicted_exponent(find_problem("poisson_2d"), RadialKernel(5, 1.0), 0.0);
    CHECK(r0.predicted_exponent - rp.predicted_exponent == doctest::Approx(0.5));

    // monotone in beta on [0, 1]: increasing beta steepens by dbeta/2
    double prev = predicted_exponent(find_problem("interp_2d"), RadialKernel(7, 1.0), 0.0)
                      .predicted_exponent;
    for (double beta : {0.25, 0.5, 0.75, 1.0}) {
        double cur = predicted_exponent(find_problem("interp_2d"), RadialKernel(7, 1.0), beta)
                         .predicted_exponent;
        CHECK(prev - cur == doctest::Approx(0.125));
        prev = cur;
    }

    CHECK_THROWS_AS(predicted_exponent(find_problem("poisson_1d"), RadialKernel(3, 1.0), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(predicted_exponent(find_problem("interp_1d"), RadialKernel(5, 1.0), -0.5),
                    std::invalid_argument);
}

TEST_CASE("test grids are inclusive and nest under doubling") {
    const auto& spec1 = find_problem("interp_1d");
    auto g = test_grid(spec1, 11);
    REQUIRE(g.size() == 11);
    CHECK(g.front()[0] == 0.0);
    CHECK(g.back()[0] == 1.0);

    auto fine = test_grid(spec1, 21);  // doubling rule: 2R - 1 nests R
    std::set<double> fine_xs;
    for (const auto& p : fine) fine_xs.insert(p[0]);
    for (const auto& p : g) CHECK(fine_xs.count(p[0]) == 1);

    const auto& spec2 = find_problem("poisson_2d");
    auto g2 = test_grid(spec2, 5);
    CHECK(g2.size() == 25);
    CHECK(g2.front()[0] == 0.0);
    CHECK(g2.back()[0] == 1.0);
    CHECK(g2.back()[1] == 1.0);
}
