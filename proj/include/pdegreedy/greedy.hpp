#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pdegreedy/functionals.hpp"
#include "pdegreedy/problems.hpp"

namespace pdegreedy {

struct GreedyConfig {
    double beta = 1.0;
    int n_max = 100;
    double power_tol = 1e-7;  // candidates with power below this are in-span
    double eta_tol = 0.0;     // 0 runs to n_max or pool exhaustion
    int threads = 1;          // hint for candidate sweeps; never changes results
};

struct IterationRecord {
    int n = 0;                       // 1-based count after this selection
    std::uint32_t functional_id = 0;
    double eta = 0.0;
    double power = 0.0;              // P_{V^{n-1}}(lambda_n) at selection time
    double residual = 0.0;           // lambda_n(u - u_{n-1})
    bool zero_eta_fallback = false;  // selected by max power among zero-eta candidates
    double ms = 0.0;
};

/// Incremental Newton-basis state of a greedy run. Each selection appends
/// one orthonormal basis element N_n; per-candidate caches carry
/// z_l(mu) = mu(N_l), the squared power, and the data residual, and are
/// updated in O(q) per step. Caches of selected or span-filtered
/// candidates are frozen: they are out of play, and further updates would
/// only accumulate roundoff against a quantity that is exactly zero.
struct GreedyState {
    GreedyState(RadialKernel k, std::vector<Functional> pool)
        : kernel(std::move(k)), functionals(std::move(pool)) {}

    RadialKernel kernel;
    std::vector<Functional> functionals;  // the candidate pool
    std::vector<double> data;             // lambda(u) per candidate
    double data_scale = 0.0;              // max |data|
    double gram_scale = 0.0;              // max initial power^2

    std::vector<int> selected;                     // pool indices in selection order
    std::vector<std::vector<double>> newton_rows;  // row j: lambda_j(N_l), l <= j
    std::vector<double> coeffs;                    // u_n = sum c_j N_j

    int capacity = 0;  // column stride of cand_z
    std::vector<double> cand_z;        // q x capacity, row-major per candidate
    std::vector<double> cand_power2;
    std::vector<double> cand_residual;
    std::vector<std::uint8_t> active;
    int n_active = 0;

    int size() const { return static_cast<int>(selected.size()); }

    std::span<const double> z_row(int cand) const {
        return {cand_z.data() + static_cast<std::size_t>(cand) * capacity,
                static_cast<std::size_t>(size())};
    }

    /// lambda_j(u_n) recomputed from the frozen triangular data; the
    /// entries lambda_j(N_l) vanish for l > j, so the stored row suffices
    /// for any n >= j.
    double selected_functional_value(int j) const;
};

/// n = 0 state: power^2 = gram diagonal, residual = data, all active.
GreedyState initialize(const RadialKernel& kernel, const ProblemSpec& spec,
                       const CandidateSet& candidates, const GreedyConfig& config);

/// Selection score |r|^beta * P^(1-beta) with the conventions: beta = 0
/// ignores the residual entirely, beta = 1 is |r|, and for beta > 1 the
/// power factor is clamped below at power_tol before exponentiation.
double eta(const GreedyState& state, int candidate, const GreedyConfig& config);

/// One greedy step: filter span-contained candidates, select the score
/// argmax (ties to the smallest id; an all-zero score field falls back to
/// max power, then smallest id), append the Newton column, update caches.
/// Throws when no active candidates remain.
IterationRecord step(GreedyState& state, const GreedyConfig& config);

/// Full iteration: runs step until n_max selections, pool exhaustion, or
/// (for eta_tol > 0) the best score drops to eta_tol.
std::pair<GreedyState, std::vector<IterationRecord>> run(const RadialKernel& kernel,
                                                         const ProblemSpec& spec,
                                                         const CandidateSet& candidates,
                                                         const GreedyConfig& config);

/// u_n at each point, by forward substitution through the Newton
/// triangle; n = 0 yields zeros.
std::vector<double> evaluate_interpolant(const GreedyState& state, const RadialKernel& kernel,
                                         std::span<const std::array<double, kMaxDim>> points,
                                         int threads = 1);

}  // namespace pdegreedy
