#include "pdegreedy/greedy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace pdegreedy {

namespace {

// Deterministic slice-parallel sweep over [0, count): fn(lo, hi, slice)
// may only touch candidate-indexed data plus its own slice's reduction
// cell, so results do not depend on thread count or timing.
template <typename Fn>
int parallel_sweep(int count, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, std::max(1, count));
    if (threads == 1 || count < 512) {
        fn(0, count, 0);
        return 1;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int lo = static_cast<int>(static_cast<long long>(count) * t / threads);
        const int hi = static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
        pool.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
    }
    for (auto& th : pool) th.join();
    return threads;
}

struct Pick {
    int index = -1;
    double eta = -1.0;
    double power = -1.0;

    // total order: score, then power (separates the zero-score field),
    // then smallest id; index order equals id order in the pool
    bool better_than(const Pick& o) const {
        if (eta != o.eta) return eta > o.eta;
        if (eta == 0.0 && power != o.power) return power > o.power;
        return index < o.index;
    }
};

double eta_value(double power2, double residual, const GreedyConfig& config) {
    const double p = std::sqrt(std::max(0.0, power2));
    if (config.beta == 0.0) return p;
    const double r = std::abs(residual);
    if (config.beta == 1.0) return r;
    const double pc = config.beta > 1.0 ? std::max(p, config.power_tol) : p;
    return std::pow(r, config.beta) * std::pow(pc, 1.0 - config.beta);
}

// Phase 1 of a step: span filter plus score argmax over the remaining
// active candidates.
std::optional<Pick> filter_and_argmax(GreedyState& state, const GreedyConfig& config) {
    const int q = static_cast<int>(state.functionals.size());
    const double tol2 = config.power_tol * config.power_tol;
    const int max_slices = std::max(1, config.threads);
    std::vector<Pick> best(max_slices);
    std::vector<int> dropped(max_slices, 0);

    parallel_sweep(q, config.threads, [&](int lo, int hi, int slice) {
        Pick local;
        int local_dropped = 0;
        for (int i = lo; i < hi; ++i) {
            if (!state.active[i]) continue;
            if (state.cand_power2[i] <= tol2) {
                state.active[i] = 0;
                ++local_dropped;
                continue;
            }
            Pick cand{i, eta_value(state.cand_power2[i], state.cand_residual[i], config),
                      std::sqrt(state.cand_power2[i])};
            if (local.index < 0 || cand.better_than(local)) local = cand;
        }
        best[slice] = local;
        dropped[slice] = local_dropped;
    });

    Pick overall;
    for (const Pick& b : best)
        if (b.index >= 0 && (overall.index < 0 || b.better_than(overall))) overall = b;
    for (int drops : dropped) state.n_active -= drops;

    if (overall.index < 0) return std::nullopt;
    return overall;
}

void apply_selection(GreedyState& state, const GreedyConfig& config, const Pick& pick,
                     IterationRecord& rec) {
    const int q = static_cast<int>(state.functionals.size());
    const int n = state.size();
    if (n >= state.capacity)
        throw std::logic_error("greedy step past the configured n_max capacity");

    const int star = pick.index;
    const double p = std::sqrt(state.cand_power2[star]);
    const double c = state.cand_residual[star] / p;
    const Functional& fstar = state.functionals[star];

    rec.n = n + 1;
    rec.functional_id = state.functionals[star].id;
    rec.eta = pick.eta;
    rec.power = p;
    rec.residual = state.cand_residual[star];
    rec.zero_eta_fallback = (pick.eta == 0.0);

    const double* star_row = state.cand_z.data() + static_cast<std::size_t>(star) * state.capacity;
    const double breakdown = -1e-12 * std::max(1.0, state.gram_scale);

    std::atomic<bool> bad{false};
    parallel_sweep(q, config.threads, [&](int lo, int hi, int) {
        for (int i = lo; i < hi; ++i) {
            if (!state.active[i]) continue;
            double* row = state.cand_z.data() + static_cast<std::size_t>(i) * state.capacity;
            double z;
            if (i == star) {
                z = p;
            } else {
                double dot = 0.0;
                for (int l = 0; l < n; ++l) dot += row[l] * star_row[l];
                z = (gram_entry(state.kernel, state.functionals[i], fstar) - dot) / p;
            }
            row[n] = z;
            double pw = state.cand_power2[i] - z * z;
            if (pw < breakdown) bad.store(true, std::memory_order_relaxed);
            pw = std::max(pw, 0.0);
            state.cand_power2[i] = pw;
            state.cand_residual[i] -= c * z;
            if (!std::isfinite(z) || !std::isfinite(state.cand_residual[i]))
                bad.store(true, std::memory_order_relaxed);
        }
    });

    if (bad.load() || !std::isfinite(c) || !std::isfinite(p))
        throw std::runtime_error(
            "greedy breakdown at n = " + std::to_string(n + 1) +
            ": non-finite update or power below the breakdown threshold");

    state.newton_rows.emplace_back(star_row, star_row + n + 1);
    state.coeffs.push_back(c);
    state.selected.push_back(star);
    state.cand_power2[star] = 0.0;  // exactly in span by construction
    state.active[star] = 0;
    --state.n_active;
}

}  // namespace

double GreedyState::selected_functional_value(int j) const {
    const auto& row = newton_rows[j];
    double acc = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) acc += coeffs[l] * row[l];
    return acc;
}

GreedyState initialize(const RadialKernel& kernel, const ProblemSpec& spec,
                       const CandidateSet& candidates, const GreedyConfig& config) {
    if (candidates.functionals.empty())
        throw std::invalid_argument("initialize: empty candidate set");
    if (config.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (!(config.power_tol > 0.0)) throw std::invalid_argument("power_tol must be > 0");
    if (!(config.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    validate_problem(spec, kernel);

    GreedyState state(kernel, candidates.functionals);
    const int q = static_cast<int>(state.functionals.size());
    state.capacity = std::min(config.n_max, q);
    state.cand_z.assign(static_cast<std::size_t>(q) * state.capacity, 0.0);
    state.data.resize(q);
    state.cand_power2.resize(q);
    state.cand_residual.resize(q);
    state.active.assign(q, 1);
    state.n_active = q;

    for (int i = 0; i < q; ++i) {
        const Functional& f = state.functionals[i];
        state.cand_power2[i] = gram_entry(kernel, f, f);
        state.gram_scale = std::max(state.gram_scale, state.cand_power2[i]);
        const DomainPiece& piece = spec.pieces[f.domain_index - 1];
        state.data[i] = piece.data.eval(f.point[0], f.point[1]);
        state.cand_residual[i] = state.data[i];
        state.data_scale = std::max(state.data_scale, std::abs(state.data[i]));
    }
    return state;
}

double eta(const GreedyState& state, int candidate, const GreedyConfig& config) {
    if (candidate < 0 || candidate >= static_cast<int>(state.functionals.size()))
        throw std::invalid_argument("eta: candidate index out of range");
    if (!state.active[candidate] ||
        state.cand_power2[candidate] <= config.power_tol * config.power_tol)
        throw std::logic_error("eta: candidate is not active");
    return eta_value(state.cand_power2[candidate], state.cand_residual[candidate], config);
}

IterationRecord step(GreedyState& state, const GreedyConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    auto pick = filter_and_argmax(state, config);
    if (!pick)
        throw std::runtime_error("step: no active candidates (pool is numerically in span)");
    IterationRecord rec;
    apply_selection(state, config, *pick, rec);
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                 .count();
    return rec;
}

std::pair<GreedyState, std::vector<IterationRecord>> run(const RadialKernel& kernel,
                                                         const ProblemSpec& spec,
                                                         const CandidateSet& candidates,
                                                         const GreedyConfig& config) {
    GreedyState state = initialize(kernel, spec, candidates, config);
    std::vector<IterationRecord> records;
    records.reserve(std::min<std::size_t>(config.n_max, candidates.size()));

    while (state.size() < config.n_max) {
        const auto start = std::chrono::steady_clock::now();
        auto pick = filter_and_argmax(state, config);
        if (!pick) break;  // whole pool numerically in span
        if (config.eta_tol > 0.0 && pick->eta <= config.eta_tol) break;
        IterationRecord rec;
        apply_selection(state, config, *pick, rec);
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                           start)
                     .count();
        records.push_back(rec);
    }
    return {std::move(state), std::move(records)};
}

std::vector<double> evaluate_interpolant(const GreedyState& state, const RadialKernel& kernel,
                                         std::span<const std::array<double, kMaxDim>> points,
                                         int threads) {
    const int n = state.size();
    std::vector<double> out(points.size(), 0.0);
    if (n == 0) return out;

    const int dim = state.functionals.empty() ? 1 : state.functionals[0].dim;
    auto sweep = [&](int lo, int hi, int) {
        std::vector<double> basis(n);
        for (int pt = lo; pt < hi; ++pt) {
            std::span<const double> x(points[pt].data(), static_cast<std::size_t>(dim));
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const auto& row = state.newton_rows[j];
                double v = representer_eval(kernel, state.functionals[state.selected[j]], x);
                for (int l = 0; l < j; ++l) v -= row[l] * basis[l];
                basis[j] = v / row[j];
                acc += state.coeffs[j] * basis[j];
            }
            out[pt] = acc;
        }
    };
    parallel_sweep(static_cast<int>(points.size()), threads, sweep);
    return out;
}

}  // namespace pdegreedy
