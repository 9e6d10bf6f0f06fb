#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <span>
#include <vector>

#include "pdegreedy/functionals.hpp"

namespace pdegreedy {

/// Reference solution of the full generalized interpolation system by one
/// dense unpivoted Cholesky factorization. Verification-scale only; the
/// incremental engine is checked against this route.
struct DenseSolution {
    RadialKernel kernel;
    std::vector<Functional> functionals;
    Eigen::MatrixXd gram;
    Eigen::LLT<Eigen::MatrixXd> chol;
    Eigen::VectorXd alpha;

    /// u_n(x) = sum_j alpha_j v_{lambda_j}(x)
    double evaluate(std::span<const double> x) const;
    /// ||u_n||^2 = alpha' G alpha (= data' alpha for exact solves)
    double norm_squared() const;
};

/// Solves G alpha = data. Throws if the Gram factorization fails, which
/// signals a numerically dependent functional set.
DenseSolution solve_dense(const RadialKernel& kernel, std::vector<Functional> functionals,
                          std::span<const double> data);

/// P_{V^n}(lambda) = sqrt(max(0, gram(l,l) - b' G^-1 b)), b_j = gram(l_j, l).
double power_dense(const DenseSolution& sol, const Functional& lambda);
double power_dense(const RadialKernel& kernel, std::span<const Functional> functionals,
                   const Functional& lambda);

}  // namespace pdegreedy
