#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pdegreedy/radial_kernel.hpp"

namespace pdegreedy {

inline constexpr int kMaxDim = 3;

/// A collocation functional delta_x composed with an operator: evaluates
/// L u at a fixed point of one problem domain.
struct Functional {
    std::uint32_t id = 0;      // unique within a CandidateSet, stable across a run
    int domain_index = 1;      // 1-based piece index
    OperatorTag op = OperatorTag::Identity;
    std::array<double, kMaxDim> point{};
    int dim = 1;

    std::span<const double> coords() const { return {point.data(), static_cast<std::size_t>(dim)}; }
};

/// Flat, deterministically ordered pool of candidate functionals over all
/// problem domains. Selection may mix functional types freely, so the
/// pool keeps one global index space.
struct CandidateSet {
    std::vector<Functional> functionals;
    std::vector<int> per_domain_counts;

    std::size_t size() const { return functionals.size(); }
};

/// <v_lambda, v_mu> = (L_lambda (x) L_mu) k(x_lambda, x_mu).
double gram_entry(const RadialKernel& kernel, const Functional& lhs, const Functional& rhs);

/// v_lambda(x) = (L_lambda (x) Identity) k(x_lambda, x); evaluates
/// interpolants pointwise.
double representer_eval(const RadialKernel& kernel, const Functional& lambda,
                        std::span<const double> x);

}  // namespace pdegreedy
