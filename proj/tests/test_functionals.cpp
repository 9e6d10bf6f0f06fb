#include "pdegreedy/functionals.hpp"

#include <Eigen/Dense>
#include <random>

#include "doctest.h"

using namespace pdegreedy;

namespace {

Functional make(std::uint32_t id, OperatorTag op, double x, double y, int dim) {
    Functional f;
    f.id = id;
    f.op = op;
    f.point = {x, y, 0.0};
    f.dim = dim;
    return f;
}

}  // namespace

TEST_CASE("gram entries at coincident points reduce to the derived constants") {
    RadialKernel k(5, 1.0);
    auto ident = make(0, OperatorTag::Identity, 0.3, 0.6, 2);
    auto lap = make(1, OperatorTag::NegLaplacian, 0.3, 0.6, 2);

    CHECK(gram_entry(k, ident, ident) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gram_entry(k, ident, lap) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(gram_entry(k, lap, lap) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gram is symmetric and representer_eval with Identity is a kernel value") {
    RadialKernel k(7, 1.4);
    std::mt19937 rng(52);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        auto a = make(0, rep % 2 ? OperatorTag::NegLaplacian : OperatorTag::Identity,
                      unit(rng), unit(rng), 2);
        auto b = make(1, rep % 3 ? OperatorTag::Identity : OperatorTag::NegLaplacian,
                      unit(rng), unit(rng), 2);
        CHECK(gram_entry(k, a, b) == doctest::Approx(gram_entry(k, b, a)).epsilon(1e-15));

        double x[2] = {unit(rng), unit(rng)};
        auto id_fn = make(2, OperatorTag::Identity, a.point[0], a.point[1], 2);
        double direct = kernel_apply(k, OperatorTag::Identity, OperatorTag::Identity,
                                     id_fn.coords(), std::span<const double>(x, 2));
        CHECK(representer_eval(k, id_fn, std::span<const double>(x, 2)) ==
              doctest::Approx(direct).epsilon(1e-15));
    }

    // representer at its own point equals the gram diagonal route
    auto lap = make(3, OperatorTag::NegLaplacian, 0.5, 0.5, 2);
    RadialKernel k52(5, 1.0);
    CHECK(representer_eval(k52, lap, lap.coords()) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    auto ident = make(4, OperatorTag::Identity, 0.2, 0.9, 2);
    CHECK(representer_eval(k52, ident, ident.coords()) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("mixed-operator gram matrices are positive semidefinite") {
    RadialKernel k(7, 1.0);
    std::mt19937 rng(9001);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 6 + static_cast<int>(rng() % 7);
        std::vector<Functional> fs;
        for (int i = 0; i < n; ++i)
            fs.push_back(make(i, i % 2 ? OperatorTag::NegLaplacian : OperatorTag::Identity,
                              unit(rng), unit(rng), 2));
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = gram_entry(k, fs[i], fs[j]);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * g.trace());
    }
}
