#include "pdegreedy/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pdegreedy/dense_oracle.hpp"
#include "pdegreedy/greedy.hpp"
#include "pdegreedy/study.hpp"

namespace pdegreedy {

namespace {

// Plain Matern evaluation in long double, independent of the derivative
// tables, for the finite-difference reference values.
long double phi_plain(int twice_nu, long double r) {
    long double p = 0.0L;
    switch (twice_nu) {
        case 3: p = 1.0L + r; break;
        case 5: p = 1.0L + r + r * r / 3.0L; break;
        case 7: p = 1.0L + r + 2.0L * r * r / 5.0L + r * r * r / 15.0L; break;
        case 9:
            p = 1.0L + r + 3.0L * r * r / 7.0L + 2.0L * r * r * r / 21.0L +
                r * r * r * r / 105.0L;
            break;
    }
    return p * std::exp(-r);
}

long double kernel_plain(int twice_nu, long double shape, std::span<const double> x,
                         std::span<const double> y, int di, long double dx, int dj,
                         long double dy) {
    long double dist2 = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double diff = static_cast<long double>(x[i]) - static_cast<long double>(y[i]);
        if (static_cast<int>(i) == di) diff += dx;
        if (static_cast<int>(i) == dj) diff -= dy;
        dist2 += diff * diff;
    }
    return phi_plain(twice_nu, shape * std::sqrt(dist2));
}

double fd_neg_laplacian(int twice_nu, double shape, std::span<const double> x,
                        std::span<const double> y, double h) {
    static constexpr long double w[5] = {-1.0L, 16.0L, -30.0L, 16.0L, -1.0L};
    long double acc = 0.0L;
    const long double hl = h;
    for (int i = 0; i < static_cast<int>(y.size()); ++i) {
        long double cell = 0.0L;
        for (int a = -2; a <= 2; ++a)
            cell += w[a + 2] * kernel_plain(twice_nu, shape, x, y, -1, 0.0L, i, a * hl);
        acc += cell / (12.0L * hl * hl);
    }
    return static_cast<double>(-acc);
}

double fd_laplacian_xy(int twice_nu, double shape, std::span<const double> x,
                       std::span<const double> y, double h) {
    static constexpr long double w[5] = {-1.0L, 16.0L, -30.0L, 16.0L, -1.0L};
    long double acc = 0.0L;
    const long double hl = h;
    for (int i = 0; i < static_cast<int>(x.size()); ++i)
        for (int j = 0; j < static_cast<int>(y.size()); ++j) {
            long double cell = 0.0L;
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b)
                    cell += w[a + 2] * w[b + 2] *
                            kernel_plain(twice_nu, shape, x, y, i, a * hl, j, b * hl);
            acc += cell / (144.0L * hl * hl * hl * hl);
        }
    return static_cast<double>(acc);
}

// Closed-form operator application assembled from psi_derivatives, with
// the optional fault on psi'''.
double closed_form(const RadialKernel& kernel, int laps, std::span<const double> x,
                   std::span<const double> y, bool fault) {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double eps2 = kernel.shape() * kernel.shape();
    const double s = eps2 * dist2;
    PsiDerivs p = kernel.psi_derivatives(s);
    if (fault) p.d3 *= 1.001;
    const int d = static_cast<int>(x.size());
    if (laps == 0) return p.psi;
    if (laps == 1) return -eps2 * (4.0 * s * p.d2 + 2.0 * d * p.d1);
    return eps2 * eps2 * (16.0 * s * s * p.d4 + (16.0 * d + 32.0) * s * p.d3 +
                          (4.0 * d * d + 8.0 * d) * p.d2);
}

struct Harness {
    std::vector<CheckResult> results;

    void add(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }
};

void check_kernel_fd(Harness& h, bool fault) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst_single = 0.0, worst_double = 0.0;
    for (int rep = 0; rep < 60; ++rep) {
        const int tn = (rep % 3 == 0) ? 5 : (rep % 3 == 1 ? 7 : 9);
        const int d = 1 + rep % 3;
        const double shape = 0.9 + 0.2 * (rep % 4);
        RadialKernel kernel(tn, shape);
        std::vector<double> x(d), y(d);
        double dist2 = 0.0;
        do {
            dist2 = 0.0;
            for (int i = 0; i < d; ++i) {
                x[i] = unit(rng);
                y[i] = unit(rng);
                dist2 += (x[i] - y[i]) * (x[i] - y[i]);
            }
        } while (dist2 < 0.01 || dist2 > 9.0);

        std::vector<double> origin(d, 0.0);
        const double scale1 = std::abs(closed_form(kernel, 1, origin, origin, false));
        const double scale2 = std::abs(closed_form(kernel, 2, origin, origin, false));

        double got1 = kernel_apply(kernel, OperatorTag::Identity, OperatorTag::NegLaplacian, x, y);
        double fd1 = fd_neg_laplacian(tn, shape, x, y, 1e-4);
        worst_single = std::max(worst_single,
                                std::abs(got1 - fd1) / std::max(std::abs(fd1), 0.25 * scale1));

        double got2 = closed_form(kernel, 2, x, y, fault);
        double fd2 = fd_laplacian_xy(tn, shape, x, y, 1e-3);
        worst_double = std::max(worst_double,
                                std::abs(got2 - fd2) / std::max(std::abs(fd2), 0.25 * scale2));
    }
    std::ostringstream ss;
    ss << "max rel err single=" << worst_single << " double=" << worst_double;
    h.add("kernel_fd_single", worst_single <= 1e-6, ss.str());
    h.add("kernel_fd_double", worst_double <= 1e-4, ss.str());
}

void check_kernel_constants(Harness& h) {
    RadialKernel k(5, 1.0);
    std::vector<double> x{0.3, 0.4};
    const double mixed = kernel_apply(k, OperatorTag::Identity, OperatorTag::NegLaplacian, x, x);
    const double dbl = kernel_apply(k, OperatorTag::NegLaplacian, OperatorTag::NegLaplacian, x, x);
    const bool pass = std::abs(mixed - 2.0 / 3.0) <= 1e-10 && std::abs(dbl - 8.0 / 3.0) <= 1e-10 &&
                      std::abs(kernel_apply(k, OperatorTag::Identity, OperatorTag::Identity, x, x) -
                               1.0) <= 1e-12;
    std::ostringstream ss;
    ss << "id*lap=" << mixed << " lap*lap=" << dbl;
    h.add("kernel_coincident_constants", pass, ss.str());
}

void check_branch_continuity(Harness& h) {
    double worst = 0.0;
    for (int tn : {3, 5, 7, 9}) {
        RadialKernel k(tn, 1.0);
        const double s_hi = RadialKernel::kSeriesThreshold;
        const double s_lo = std::nextafter(s_hi, 0.0);
        auto a = k.psi_derivatives(s_lo);
        auto b = k.psi_derivatives(s_hi);
        const double vals[5][2] = {{a.psi, b.psi}, {a.d1, b.d1}, {a.d2, b.d2},
                                   {a.d3, b.d3}, {a.d4, b.d4}};
        for (const auto& v : vals)
            worst = std::max(worst, std::abs(v[0] - v[1]) / std::max(1e-300, std::abs(v[1])));
    }
    std::ostringstream ss;
    ss << "max branch mismatch=" << worst;
    h.add("kernel_branch_continuity", worst <= 1e-10, ss.str());
}

void check_oracle_equivalence(Harness& h, int threads) {
    bool pass = true;
    std::ostringstream ss;
    RadialKernel kernel(5, 1.0);
    for (const char* name : {"poisson_1d", "interp_2d"}) {
        const auto& spec = find_problem(name);
        std::vector<int> counts;
        for (const auto& piece : spec.pieces)
            counts.push_back(piece.geometry == Geometry::UnitIntervalEndpoints ? 2 : 60);
        auto candidates = generate_candidates(spec, counts, 11);

        for (double beta : {0.0, 1.0}) {
            GreedyConfig config;
            config.beta = beta;
            config.n_max = 10;
            config.threads = threads;
            auto [state, records] = run(kernel, spec, candidates, config);

            std::vector<Functional> chosen;
            std::vector<double> data;
            for (int idx : state.selected) {
                chosen.push_back(state.functionals[idx]);
                data.push_back(state.data[idx]);
            }
            auto dense = solve_dense(kernel, chosen, data);

            auto grid = test_grid(spec, spec.ambient_dim == 1 ? 64 : 9);
            auto values = evaluate_interpolant(state, kernel, grid, threads);
            double scale = 1e-12, diff = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                double want = dense.evaluate(
                    std::span(grid[g].data(), static_cast<std::size_t>(spec.ambient_dim)));
                scale = std::max(scale, std::abs(want));
                diff = std::max(diff, std::abs(values[g] - want));
            }
            if (diff > 1e-8 * scale) pass = false;

            for (std::size_t i = 0; i < candidates.size(); ++i) {
                double pg = std::sqrt(state.cand_power2[i]);
                double pd = power_dense(dense, state.functionals[i]);
                if (std::abs(pg - pd) > 1e-8 * std::max(pg, pd) && std::max(pg, pd) > 2e-7)
                    pass = false;
            }
            ss << name << "/beta" << beta << " grid diff=" << diff / scale << "; ";
        }
    }
    h.add("oracle_equivalence", pass, ss.str());
}

void check_monotonic_and_constraints(Harness& h) {
    RadialKernel kernel(5, 1.0);
    const auto& spec = find_problem("poisson_1d");
    int counts[] = {50, 2};
    auto candidates = generate_candidates(spec, counts, 3);
    GreedyConfig config;
    config.beta = 0.5;
    config.n_max = 20;

    auto state = initialize(kernel, spec, candidates, config);
    std::vector<double> prev = state.cand_power2;
    double prev_norm = 0.0;
    bool mono = true, constraints = true, growth = true;
    for (int it = 0; it < config.n_max; ++it) {
        step(state, config);
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (state.cand_power2[i] > prev[i]) mono = false;
        prev = state.cand_power2;
        double norm = 0.0;
        for (double c : state.coeffs) norm += c * c;
        if (norm < prev_norm) growth = false;
        prev_norm = norm;
        for (int j = 0; j < state.size(); ++j) {
            const int idx = state.selected[j];
            if (std::abs(state.selected_functional_value(j) - state.data[idx]) >
                1e-8 * std::max(1.0, state.data_scale))
                constraints = false;
            if (std::sqrt(state.cand_power2[idx]) > config.power_tol) constraints = false;
        }
    }
    h.add("power_monotonicity", mono, "per-candidate power never increased");
    h.add("norm_growth", growth, "coefficient norm nondecreasing");
    h.add("constraint_satisfaction", constraints,
          "selected residuals and powers within tolerance");
}

void check_determinism(Harness& h) {
    RadialKernel kernel(5, 1.0);
    const auto& spec = find_problem("poisson_1d");
    int counts[] = {600, 2};
    auto candidates = generate_candidates(spec, counts, 0);
    std::vector<std::vector<std::uint32_t>> ids;
    for (int threads : {1, 4, 8}) {
        GreedyConfig config;
        config.beta = 1.0;
        config.n_max = 15;
        config.threads = threads;
        auto [state, records] = run(kernel, spec, candidates, config);
        std::vector<std::uint32_t> seq;
        for (const auto& rec : records) seq.push_back(rec.functional_id);
        ids.push_back(std::move(seq));
    }
    const bool pass = ids[0] == ids[1] && ids[0] == ids[2];
    h.add("thread_determinism", pass, "selection identical for thread hints 1/4/8");
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    Harness h;
    check_kernel_fd(h, options.inject_kernel_fault);
    check_kernel_constants(h);
    check_branch_continuity(h);
    check_oracle_equivalence(h, options.threads);
    check_monotonic_and_constraints(h);
    check_determinism(h);
    return h.results;
}

}  // namespace pdegreedy
