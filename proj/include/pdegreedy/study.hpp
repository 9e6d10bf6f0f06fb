#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdegreedy/greedy.hpp"
#include "pdegreedy/problems.hpp"

namespace pdegreedy {

/// Fully resolved run description. parse_run_config validates the raw
/// JSON document against the schema in the README.
struct RunConfig {
    ProblemSpec problem;
    RadialKernel kernel{5, 1.0};
    std::vector<double> betas{1.0};
    int n_max = 100;
    std::vector<int> counts;  // per piece
    int test_resolution = 0;  // 0 = problem default
    std::uint64_t seed = 0;
    double power_tol = 1e-7;
    double eta_tol = 0.0;
    int fit_lo = 0, fit_hi = 0;  // 0 = defaults [max(10, I), n_max/2]
    int threads = 1;
    std::string out_dir = "out";
    bool inline_problem = false;

    GreedyConfig greedy(double beta) const;
    int resolved_fit_lo() const;
    int resolved_fit_hi() const;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Per-iteration sup and RMS errors of u_j against the exact solution on
/// the test grid, j = 1..n. Block-structured so results are independent
/// of the thread count.
struct ErrorCurves {
    std::vector<double> linf;
    std::vector<double> l2;
};
ErrorCurves error_curves(const GreedyState& state, const RadialKernel& kernel,
                         const ProblemSpec& spec, int resolution, int threads);

/// E(n) = min_{n+1 <= j <= 2n} e(j), for n = 1..floor(len/2).
std::vector<double> windowed_min(std::span<const double> errors);

/// p_n: geometric mean of the selection-time power values over
/// j in [n+1, 2n], for n = 1..floor(len/2).
std::vector<double> power_product_sequence(std::span<const IterationRecord> records);

/// Least-squares slope of log(y) against log(n) over n in [lo, hi]
/// (1-based, inclusive); nonpositive values are skipped.
double fit_loglog_slope(std::span<const double> values, int lo, int hi);

struct BetaStudy {
    double beta = 0.0;
    std::vector<IterationRecord> records;
    std::vector<Functional> selected;
    ErrorCurves errors;
    std::vector<double> windowed;
    std::vector<double> pn;
    RatePrediction prediction;
    double slope_e = 0.0, slope_windowed = 0.0, slope_pn = 0.0;
    int fallback_steps = 0;
    double run_ms = 0.0, errors_ms = 0.0;
};

struct StudyReport {
    RunConfig config;
    std::vector<BetaStudy> betas;
};

BetaStudy run_one_beta(const RunConfig& config, double beta, bool fit_slopes = true);
StudyReport run_study(const RunConfig& config);

/// CLI entry points: artifacts on disk plus a short stdout summary.
/// Return the process exit code.
int cmd_solve(const RunConfig& config);
int cmd_study(const RunConfig& config);

nlohmann::ordered_json study_report_json(const StudyReport& report);
std::string trace_csv(const BetaStudy& study, int ambient_dim);
std::string errors_csv(const BetaStudy& study);

}  // namespace pdegreedy
