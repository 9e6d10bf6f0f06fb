#include "pdegreedy/study.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pdegreedy/report_io.hpp"

namespace pdegreedy {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int parse_twice_nu(const json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        if (slash != std::string::npos && s.substr(slash) == "/2")
            return std::stoi(s.substr(0, slash));
        throw std::invalid_argument("kernel nu string must look like \"7/2\"");
    }
    if (v.is_number()) {
        const double nu = v.get<double>();
        const double doubled = 2.0 * nu;
        const int tn = static_cast<int>(std::lround(doubled));
        if (std::abs(doubled - tn) > 1e-12)
            throw std::invalid_argument("kernel nu must be a half-integer");
        return tn;
    }
    throw std::invalid_argument("kernel nu must be a number or \"p/2\" string");
}

ProblemSpec parse_inline_problem(const json& doc) {
    ProblemSpec spec;
    spec.name = doc.value("name", "custom");
    spec.ambient_dim = doc.at("ambient_dim").get<int>();
    for (const auto& pj : doc.at("pieces")) {
        DomainPiece piece;
        piece.geometry = geometry_from_name(pj.at("geometry").get<std::string>());
        piece.a = pj.value("a", 0.0);
        piece.b = pj.value("b", 1.0);
        piece.intrinsic_dim = piece.geometry == Geometry::UnitSquareInterior ? 2 : 1;
        piece.op = operator_from_name(pj.at("op").get<std::string>());
        piece.data = Expr::parse(pj.at("data").get<std::string>());
        spec.pieces.push_back(std::move(piece));
    }
    spec.exact_solution = Expr::parse(doc.at("exact").get<std::string>());
    spec.test_grid_resolution = doc.value("test_resolution", 0);
    return spec;
}

std::vector<int> parse_counts(const json& doc, const ProblemSpec& spec) {
    std::vector<int> counts;
    if (!doc.contains("candidates")) {
        for (const auto& piece : spec.pieces)
            counts.push_back(piece.geometry == Geometry::UnitIntervalEndpoints ? 2 : 1000);
        return counts;
    }
    const json& c = doc.at("candidates");
    if (c.is_number_integer()) {
        const int n = c.get<int>();
        for (const auto& piece : spec.pieces)
            counts.push_back(piece.geometry == Geometry::UnitIntervalEndpoints ? std::min(n, 2)
                                                                               : n);
        return counts;
    }
    if (c.is_array()) {
        for (const auto& v : c) counts.push_back(v.get<int>());
        return counts;
    }
    throw std::invalid_argument("candidates must be an integer or an array of per-piece counts");
}

// block size for error curves; fixed so that accumulation order (and
// therefore every emitted digit) is independent of the thread hint
constexpr int kErrorBlock = 256;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

GreedyConfig RunConfig::greedy(double beta) const {
    GreedyConfig g;
    g.beta = beta;
    g.n_max = n_max;
    g.power_tol = power_tol;
    g.eta_tol = eta_tol;
    g.threads = threads;
    return g;
}

int RunConfig::resolved_fit_lo() const {
    if (fit_lo > 0) return fit_lo;
    return std::max<int>(10, static_cast<int>(problem.pieces.size()));
}

int RunConfig::resolved_fit_hi() const {
    if (fit_hi > 0) return fit_hi;
    return std::max(resolved_fit_lo() + 1, n_max / 2);
}

RunConfig parse_run_config(const json& doc) {
    RunConfig config;

    const json& pj = doc.at("problem");
    if (pj.is_string()) {
        config.problem = find_problem(pj.get<std::string>());
    } else {
        config.problem = parse_inline_problem(pj);
        config.inline_problem = true;
    }

    if (doc.contains("kernel")) {
        const json& kj = doc.at("kernel");
        const std::string family = kj.value("family", "matern");
        if (family != "matern")
            throw std::invalid_argument("kernel family must be \"matern\"");
        config.kernel = RadialKernel(parse_twice_nu(kj.value("nu", json("7/2"))),
                                     kj.value("shape", 1.0));
    } else {
        config.kernel = RadialKernel(7, 1.0);
    }

    config.betas.clear();
    if (doc.contains("beta")) {
        const json& b = doc.at("beta");
        if (b.is_array())
            for (const auto& v : b) config.betas.push_back(v.get<double>());
        else
            config.betas.push_back(b.get<double>());
    } else {
        config.betas.push_back(1.0);
    }
    if (config.betas.empty()) throw std::invalid_argument("beta list is empty");
    for (double beta : config.betas)
        if (!(beta >= 0.0)) throw std::invalid_argument("beta values must be >= 0");

    config.n_max = doc.value("n_max", 100);
    if (config.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    config.counts = parse_counts(doc, config.problem);
    if (config.counts.size() != config.problem.pieces.size())
        throw std::invalid_argument("candidates array must have one count per piece");
    config.test_resolution = doc.value("test_resolution", 0);
    config.seed = doc.value("seed", 0ull);
    config.power_tol = doc.value("power_tol", 1e-7);
    config.eta_tol = doc.value("eta_tol", 0.0);
    if (!(config.power_tol > 0.0)) throw std::invalid_argument("power_tol must be > 0");
    if (config.eta_tol < 0.0) throw std::invalid_argument("eta_tol must be >= 0");

    if (doc.contains("fit_window")) {
        const json& w = doc.at("fit_window");
        if (!w.is_array() || w.size() != 2)
            throw std::invalid_argument("fit_window must be [n_lo, n_hi]");
        config.fit_lo = w[0].get<int>();
        config.fit_hi = w[1].get<int>();
        if (config.fit_lo < 1 || config.fit_hi <= config.fit_lo)
            throw std::invalid_argument("fit_window needs 1 <= n_lo < n_hi");
        if (2 * config.fit_hi > config.n_max)
            throw std::invalid_argument(
                "fit_window n_hi must be at most n_max/2 (the windowed minimum needs j <= 2n)");
    }

    config.threads = doc.value("threads", 1);
    if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
    config.out_dir = doc.value("out_dir", "out");

    validate_problem(config.problem, config.kernel);
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    json doc = json::parse(in);
    return parse_run_config(doc);
}

ErrorCurves error_curves(const GreedyState& state, const RadialKernel& kernel,
                         const ProblemSpec& spec, int resolution, int threads) {
    const int n = state.size();
    const auto grid = test_grid(spec, resolution > 0 ? resolution
                                                     : spec.resolved_test_resolution());
    const int npoints = static_cast<int>(grid.size());
    const int nblocks = (npoints + kErrorBlock - 1) / kErrorBlock;
    const int dim = spec.ambient_dim;

    // per-block partials, combined in block order afterwards
    std::vector<double> block_max(static_cast<std::size_t>(nblocks) * n, 0.0);
    std::vector<double> block_sumsq(static_cast<std::size_t>(nblocks) * n, 0.0);

    auto process_blocks = [&](int block_lo, int block_hi) {
        std::vector<double> basis(static_cast<std::size_t>(kErrorBlock) * n);
        for (int blk = block_lo; blk < block_hi; ++blk) {
            const int lo = blk * kErrorBlock;
            const int hi = std::min(npoints, lo + kErrorBlock);
            double* bmax = block_max.data() + static_cast<std::size_t>(blk) * n;
            double* bsum = block_sumsq.data() + static_cast<std::size_t>(blk) * n;

            for (int pt = lo; pt < hi; ++pt) {
                std::span<const double> x(grid[pt].data(), static_cast<std::size_t>(dim));
                const double exact = spec.exact_solution.eval(grid[pt][0], grid[pt][1]);
                double* nb = basis.data() + static_cast<std::size_t>(pt - lo) * n;
                double u = 0.0;
                for (int j = 0; j < n; ++j) {
                    const auto& row = state.newton_rows[j];
                    double v = representer_eval(kernel, state.functionals[state.selected[j]], x);
                    for (int l = 0; l < j; ++l) v -= row[l] * nb[l];
                    nb[j] = v / row[j];
                    u += state.coeffs[j] * nb[j];
                    const double diff = std::abs(u - exact);
                    if (diff > bmax[j]) bmax[j] = diff;
                    bsum[j] += diff * diff;
                }
            }
        }
    };

    if (threads <= 1 || nblocks < 2) {
        process_blocks(0, nblocks);
    } else {
        const int nthreads = std::min(threads, nblocks);
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            const int lo = static_cast<int>(static_cast<long long>(nblocks) * t / nthreads);
            const int hi = static_cast<int>(static_cast<long long>(nblocks) * (t + 1) / nthreads);
            pool.emplace_back([&process_blocks, lo, hi] { process_blocks(lo, hi); });
        }
        for (auto& th : pool) th.join();
    }

    ErrorCurves out;
    out.linf.assign(n, 0.0);
    out.l2.assign(n, 0.0);
    for (int blk = 0; blk < nblocks; ++blk)
        for (int j = 0; j < n; ++j) {
            out.linf[j] = std::max(out.linf[j], block_max[static_cast<std::size_t>(blk) * n + j]);
            out.l2[j] += block_sumsq[static_cast<std::size_t>(blk) * n + j];
        }
    for (int j = 0; j < n; ++j) out.l2[j] = std::sqrt(out.l2[j] / npoints);
    return out;
}

std::vector<double> windowed_min(std::span<const double> errors) {
    const int len = static_cast<int>(errors.size());
    std::vector<double> out;
    for (int n = 1; 2 * n <= len; ++n) {
        double m = errors[n];  // e(n+1), index n in 0-based storage
        for (int j = n + 1; j < 2 * n; ++j) m = std::min(m, errors[j]);
        out.push_back(m);
    }
    return out;
}

std::vector<double> power_product_sequence(std::span<const IterationRecord> records) {
    const int len = static_cast<int>(records.size());
    std::vector<double> out;
    for (int n = 1; 2 * n <= len; ++n) {
        double log_acc = 0.0;
        for (int j = n + 1; j <= 2 * n; ++j) log_acc += std::log(records[j - 1].power);
        out.push_back(std::exp(log_acc / n));
    }
    return out;
}

double fit_loglog_slope(std::span<const double> values, int lo, int hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (int n = lo; n <= hi && n <= static_cast<int>(values.size()); ++n) {
        const double y = values[n - 1];
        if (!(y > 0.0)) continue;  // exact zeros carry no slope information
        const double lx = std::log(static_cast<double>(n));
        const double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) throw std::runtime_error("fit window contains fewer than 2 usable points");
    const double denom = count * sxx - sx * sx;
    return (count * sxy - sx * sy) / denom;
}

BetaStudy run_one_beta(const RunConfig& config, double beta, bool fit_slopes) {
    BetaStudy study;
    study.beta = beta;
    study.prediction = predicted_exponent(config.problem, config.kernel, beta);

    auto candidates = generate_candidates(config.problem, config.counts, config.seed);

    double t0 = now_ms();
    auto [state, records] = run(config.kernel, config.problem, candidates, config.greedy(beta));
    study.run_ms = now_ms() - t0;
    study.records = std::move(records);
    for (int idx : state.selected) study.selected.push_back(state.functionals[idx]);
    for (const auto& rec : study.records)
        if (rec.zero_eta_fallback) ++study.fallback_steps;

    t0 = now_ms();
    study.errors = error_curves(state, config.kernel, config.problem, config.test_resolution,
                                config.threads);
    study.errors_ms = now_ms() - t0;

    study.windowed = windowed_min(study.errors.linf);
    study.pn = power_product_sequence(study.records);

    if (fit_slopes) {
        const int lo = config.resolved_fit_lo();
        const int hi = std::min(config.resolved_fit_hi(),
                                static_cast<int>(study.windowed.size()));
        study.slope_e = fit_loglog_slope(study.errors.linf, lo,
                                         std::min<int>(hi, study.errors.linf.size()));
        study.slope_windowed = fit_loglog_slope(study.windowed, lo, hi);
        study.slope_pn = fit_loglog_slope(study.pn, lo, std::min<int>(hi, study.pn.size()));
    }
    return study;
}

StudyReport run_study(const RunConfig& config) {
    StudyReport report{config, {}};
    for (double beta : config.betas) report.betas.push_back(run_one_beta(config, beta));
    return report;
}

namespace {

ordered_json config_json(const RunConfig& config) {
    ordered_json j;
    j["problem"] = config.problem.name;
    j["inline_problem"] = config.inline_problem;
    j["kernel"] = kernel_to_json(config.kernel);
    j["beta"] = config.betas;
    j["n_max"] = config.n_max;
    j["candidates"] = config.counts;
    j["test_resolution"] = config.test_resolution > 0
                               ? config.test_resolution
                               : config.problem.resolved_test_resolution();
    j["seed"] = config.seed;
    j["power_tol"] = config.power_tol;
    j["eta_tol"] = config.eta_tol;
    j["fit_window"] = {config.resolved_fit_lo(), config.resolved_fit_hi()};
    j["threads"] = config.threads;
    return j;
}

ordered_json prediction_json(const RatePrediction& p) {
    ordered_json j;
    j["tau"] = p.tau;
    j["beta"] = p.beta;
    j["m_bar"] = p.m_bar;
    j["d_bar"] = p.d_bar;
    j["predicted_exponent"] = p.predicted_exponent;
    j["pn_exponent"] = p.pn_exponent;
    auto pieces = ordered_json::array();
    for (const auto& pe : p.per_piece) {
        ordered_json pj;
        pj["domain"] = pe.domain_index;
        pj["order"] = pe.order;
        pj["dim"] = pe.dim;
        pj["exponent"] = pe.exponent;
        if (pe.trace_order) {
            pj["trace_order"] = *pe.trace_order;
            pj["trace_exponent"] = *pe.trace_exponent;
        }
        pieces.push_back(pj);
    }
    j["per_piece"] = pieces;
    return j;
}

ordered_json beta_study_json(const BetaStudy& study) {
    ordered_json j;
    j["beta"] = study.beta;
    j["n"] = study.records.size();
    j["prediction"] = prediction_json(study.prediction);
    ordered_json fits;
    fits["slope_linf"] = study.slope_e;
    fits["slope_windowed_min"] = study.slope_windowed;
    fits["slope_pn"] = study.slope_pn;
    j["fits"] = fits;
    j["fallback_steps"] = study.fallback_steps;

    auto selected = ordered_json::array();
    for (const auto& f : study.selected) selected.push_back(functional_to_json(f));
    j["selected"] = selected;

    ordered_json curves;
    curves["linf"] = study.errors.linf;
    curves["l2"] = study.errors.l2;
    curves["windowed_min"] = study.windowed;
    curves["pn"] = study.pn;
    auto powers = ordered_json::array();
    auto etas = ordered_json::array();
    for (const auto& rec : study.records) {
        powers.push_back(rec.power);
        etas.push_back(rec.eta);
    }
    curves["selection_power"] = powers;
    curves["selection_eta"] = etas;
    j["curves"] = curves;

    ordered_json timing;
    timing["run_ms"] = study.run_ms;
    timing["errors_ms"] = study.errors_ms;
    j["timing"] = timing;
    return j;
}

}  // namespace

nlohmann::ordered_json study_report_json(const StudyReport& report) {
    ordered_json j;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["config"] = config_json(report.config);
    auto betas = ordered_json::array();
    for (const auto& study : report.betas) betas.push_back(beta_study_json(study));
    j["betas"] = betas;
    return j;
}

std::string trace_csv(const BetaStudy& study, int ambient_dim) {
    std::ostringstream out;
    out << "n,functional_id,domain,op";
    for (int i = 0; i < ambient_dim; ++i) out << ",x" << i;
    out << ",eta,power,residual,linf_error,l2_error,ms\n";
    for (std::size_t i = 0; i < study.records.size(); ++i) {
        const auto& rec = study.records[i];
        const auto& f = study.selected[i];
        out << rec.n << ',' << rec.functional_id << ',' << f.domain_index << ','
            << operator_name(f.op);
        for (int c = 0; c < ambient_dim; ++c) out << ',' << csv_number(f.point[c]);
        out << ',' << csv_number(rec.eta) << ',' << csv_number(rec.power) << ','
            << csv_number(rec.residual) << ',' << csv_number(study.errors.linf[i]) << ','
            << csv_number(study.errors.l2[i]) << ',' << csv_number(rec.ms) << '\n';
    }
    return out.str();
}

std::string errors_csv(const BetaStudy& study) {
    std::ostringstream out;
    out << "n,linf_error,l2_error,windowed_min,pn\n";
    for (std::size_t i = 0; i < study.errors.linf.size(); ++i) {
        out << (i + 1) << ',' << csv_number(study.errors.linf[i]) << ','
            << csv_number(study.errors.l2[i]) << ',';
        if (i < study.windowed.size()) out << csv_number(study.windowed[i]);
        out << ',';
        if (i < study.pn.size()) out << csv_number(study.pn[i]);
        out << '\n';
    }
    return out.str();
}

int cmd_solve(const RunConfig& config) {
    if (config.betas.size() != 1)
        throw std::invalid_argument("solve expects a single beta value");
    BetaStudy study = run_one_beta(config, config.betas[0], /*fit_slopes=*/false);

    const std::string dir = config.out_dir;
    atomic_write_text(dir + "/solve_trace.csv", trace_csv(study, config.problem.ambient_dim));

    ordered_json summary;
    summary["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    summary["config"] = config_json(config);
    summary["n"] = study.records.size();
    summary["final_linf_error"] = study.errors.linf.empty() ? 0.0 : study.errors.linf.back();
    summary["final_l2_error"] = study.errors.l2.empty() ? 0.0 : study.errors.l2.back();
    summary["fallback_steps"] = study.fallback_steps;
    auto selected = ordered_json::array();
    for (const auto& f : study.selected) selected.push_back(functional_to_json(f));
    summary["selected"] = selected;
    summary["timing"] = {{"run_ms", study.run_ms}, {"errors_ms", study.errors_ms}};
    atomic_write_text(dir + "/solve_summary.json", summary.dump(2) + "\n");

    std::cout << "solve: n=" << study.records.size()
              << " final_linf=" << csv_number(study.errors.linf.empty()
                                                  ? 0.0
                                                  : study.errors.linf.back())
              << " -> " << dir << "/solve_trace.csv\n";
    return 0;
}

int cmd_study(const RunConfig& config) {
    StudyReport report = run_study(config);

    const std::string dir = config.out_dir;
    for (std::size_t b = 0; b < report.betas.size(); ++b) {
        const auto& study = report.betas[b];
        const std::string tag = "beta" + std::to_string(b);
        atomic_write_text(dir + "/study_" + tag + "_trace.csv",
                          trace_csv(study, config.problem.ambient_dim));
        atomic_write_text(dir + "/study_" + tag + "_errors.csv", errors_csv(study));
    }
    atomic_write_text(dir + "/study_report.json", study_report_json(report).dump(2) + "\n");

    for (const auto& study : report.betas) {
        std::cout << "study beta=" << study.beta << ": slope(E)=" << study.slope_windowed
                  << " predicted=" << study.prediction.predicted_exponent
                  << " slope(pn)=" << study.slope_pn
                  << " predicted_pn=" << study.prediction.pn_exponent << '\n';
    }
    std::cout << "report -> " << dir << "/study_report.json\n";
    return 0;
}

}  // namespace pdegreedy
