#include "pdegreedy/dense_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pdegreedy {

double DenseSolution::evaluate(std::span<const double> x) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
        acc += alpha[j] * representer_eval(kernel, functionals[j], x);
    return acc;
}

double DenseSolution::norm_squared() const {
    if (alpha.size() == 0) return 0.0;
    return alpha.dot(gram * alpha);
}

DenseSolution solve_dense(const RadialKernel& kernel, std::vector<Functional> functionals,
                          std::span<const double> data) {
    if (data.size() != functionals.size())
        throw std::invalid_argument("solve_dense: data length must match functional count");

    const Eigen::Index n = static_cast<Eigen::Index>(functionals.size());
    DenseSolution sol{kernel, std::move(functionals), Eigen::MatrixXd(n, n), {}, {}};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            double g = gram_entry(kernel, sol.functionals[i], sol.functionals[j]);
            sol.gram(i, j) = g;
            sol.gram(j, i) = g;
        }

    sol.chol.compute(sol.gram);
    if (n > 0 && sol.chol.info() != Eigen::Success)
        throw std::runtime_error(
            "solve_dense: Cholesky factorization failed (numerically dependent functionals)");

    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = data[i];
    sol.alpha = n > 0 ? sol.chol.solve(rhs).eval() : rhs;
    return sol;
}

double power_dense(const DenseSolution& sol, const Functional& lambda) {
    const double diag = gram_entry(sol.kernel, lambda, lambda);
    const Eigen::Index n = static_cast<Eigen::Index>(sol.functionals.size());
    if (n == 0) return std::sqrt(diag);

    Eigen::VectorXd b(n);
    for (Eigen::Index j = 0; j < n; ++j) b[j] = gram_entry(sol.kernel, sol.functionals[j], lambda);
    const double reduced = diag - b.dot(sol.chol.solve(b));
    return std::sqrt(std::max(0.0, reduced));
}

double power_dense(const RadialKernel& kernel, std::span<const Functional> functionals,
                   const Functional& lambda) {
    std::vector<double> zeros(functionals.size(), 0.0);
    DenseSolution sol = solve_dense(kernel, {functionals.begin(), functionals.end()}, zeros);
    return power_dense(sol, lambda);
}

}  // namespace pdegreedy
