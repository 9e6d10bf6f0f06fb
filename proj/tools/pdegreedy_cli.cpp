#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdegreedy/report_io.hpp"
#include "pdegreedy/study.hpp"
#include "pdegreedy/verify.hpp"

namespace {

int run_verify(int threads, bool inject_fault) {
    pdegreedy::VerifyOptions options;
    options.threads = threads;
    options.inject_kernel_fault = inject_fault;
    auto results = pdegreedy::run_verification(options);
    bool all_pass = true;
    for (const auto& check : results) {
        std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << " (" << check.detail
                  << ")\n";
        all_pass = all_pass && check.pass;
    }
    std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all_pass ? 0 : 1;
}

void apply_overrides(pdegreedy::RunConfig& config, const std::string& out_dir, int threads,
                     std::uint64_t seed, bool seed_set) {
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (threads > 0) config.threads = threads;
    if (seed_set) config.seed = seed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshfree greedy kernel collocation solver and rate-study harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool inject_fault = false;

    CLI::App* solve = app.add_subcommand("solve", "run one greedy solve and write the trace");
    solve->add_option("--config", config_path, "JSON config file")->required();
    solve->add_option("--out", out_dir, "output directory (overrides config)");
    solve->add_option("--threads", threads, "worker threads for candidate sweeps");
    CLI::Option* solve_seed = solve->add_option("--seed", seed, "candidate seed override");

    CLI::App* study = app.add_subcommand("study", "run a convergence study over the beta list");
    study->add_option("--config", config_path, "JSON config file")->required();
    study->add_option("--out", out_dir, "output directory (overrides config)");
    study->add_option("--threads", threads, "worker threads for candidate sweeps");
    CLI::Option* study_seed = study->add_option("--seed", seed, "candidate seed override");

    CLI::App* verify = app.add_subcommand("verify", "run the built-in self checks");
    verify->add_option("--config", config_path, "optional JSON config (threads only)");
    verify->add_option("--threads", threads, "worker threads");
    verify->add_flag("--inject-kernel-fault", inject_fault,
                     "corrupt a kernel derivative so the FD check must fail (test hook)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            int t = threads;
            if (t <= 0 && !config_path.empty())
                t = pdegreedy::load_run_config(config_path).threads;
            return run_verify(t > 0 ? t : 1, inject_fault);
        }

        pdegreedy::RunConfig config = pdegreedy::load_run_config(config_path);
        if (solve->parsed()) {
            apply_overrides(config, out_dir, threads, seed, !solve_seed->empty());
            return pdegreedy::cmd_solve(config);
        }
        apply_overrides(config, out_dir, threads, seed, !study_seed->empty());
        return pdegreedy::cmd_study(config);
    } catch (const std::exception& err) {
        nlohmann::ordered_json out;
        out["error"] = {{"message", err.what()}};
        std::cout << out.dump(2) << std::endl;
        return 1;
    }
}
