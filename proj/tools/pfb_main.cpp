#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "pfb/io.hpp"
#include "pfb/verify.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int seed = -1;
    std::vector<std::string> overrides;
};

pfb::RunConfig load_config(const CommonOpts& opts) {
    std::string text = opts.config_path.empty()
                           ? std::string("problem = interval_1d\n")
                           : pfb::read_text_file(opts.config_path) + "\n";
    for (const auto& assignment : opts.overrides) {
        const std::size_t eq = assignment.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got: " + assignment);
        text += assignment.substr(0, eq) + " = " + assignment.substr(eq + 1) + "\n";
    }
    pfb::RunConfig config = pfb::parse_config_text(
        text, opts.config_path.empty() ? "cli" : opts.config_path);
    if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
    if (opts.seed >= 0) config.solver.seed = static_cast<std::uint64_t>(opts.seed);
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "solver seed");
    cmd->add_option("--set", opts.overrides, "override as key=value")->take_all();
}

int run_solve(const CommonOpts& opts) {
    const pfb::RunConfig config = load_config(opts);
    if (config.problem == pfb::ProblemKind::halfdisk) {
        const pfb::FlatnessResult res =
            pfb::flatness_decay_check(pfb::flatness_config(config));
        std::printf("flatness: gamma_measured=%.12g flagged=%d\n", res.gamma_measured,
                    res.flagged ? 1 : 0);
        if (!config.output_dir.empty()) {
            std::filesystem::create_directories(config.output_dir);
            pfb::write_text_file(config.output_dir + "/field.txt",
                                 pfb::dump_field(res.field));
        }
        return res.flagged ? 1 : 0;
    }
    const double eps = config.epsilon_list.front();
    const pfb::Solution sol = pfb::solve_instance(config, eps);
    std::printf("solve: eps=%g positivity=%.12g total=%.12g iters=%d converged=%d\n", eps,
                sol.breakdown.positivity, sol.breakdown.total,
                sol.trace.empty() ? 0 : sol.trace.back().iter, sol.converged ? 1 : 0);
    if (!config.output_dir.empty())
        pfb::persist_run(config.output_dir, sol);
    return 0;
}

int run_sweep(const CommonOpts& opts) {
    const pfb::RunConfig config = load_config(opts);
    const pfb::SweepReport report = pfb::run_epsilon_sweep(config);
    std::fputs(pfb::sweep_csv(report).c_str(), stdout);
    if (report.epsilon_attained)
        std::printf("epsilon_attained=%g\n", *report.epsilon_attained);
    else
        std::puts("epsilon_attained=none");
    return 0;
}

int run_verify(const CommonOpts& opts, const std::vector<std::string>& check_args) {
    const pfb::RunConfig config = load_config(opts);
    std::vector<std::string> checks = check_args;
    if (checks.empty()) checks = config.verify_checks;
    const auto results = pfb::run_verification_suite(config, checks);
    const std::string csv = pfb::verification_csv(results);
    std::fputs(csv.c_str(), stdout);
    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        pfb::write_text_file(config.output_dir + "/verify.csv", csv);
    }
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized volume-constrained p-Dirichlet solver"};
    app.require_subcommand(1);

    CommonOpts solve_opts, sweep_opts, verify_opts;
    auto* solve_cmd = app.add_subcommand("solve", "solve one penalized problem");
    add_common(solve_cmd, solve_opts);
    auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with reports");
    add_common(sweep_cmd, sweep_opts);

    auto* verify_cmd = app.add_subcommand("verify", "run property checks");
    add_common(verify_cmd, verify_opts);
    std::vector<std::string> checks;
    verify_cmd->add_option("--checks", checks, "check names (default: config list)")
        ->expected(0, -1)
        ->take_all();

    double o_b = 1.0, o_p = 2.0, o_eps = 0.1, o_alpha = 0.5;
    int o_grid = 4096;
    bool o_curve = false;
    auto* oracle_cmd = app.add_subcommand("oracle1d", "1D ramp-family ground truth");
    oracle_cmd->add_option("--b", o_b, "boundary value");
    oracle_cmd->add_option("--p", o_p, "exponent");
    oracle_cmd->add_option("--eps", o_eps, "penalization parameter");
    oracle_cmd->add_option("--alpha", o_alpha, "target measure");
    oracle_cmd->add_option("--grid", o_grid, "scan resolution");
    oracle_cmd->add_flag("--curve", o_curve, "print the scan curve");

    double a_delta = 1.0, a_c0 = 1.0, a_p = 2.0, a_eps = 0.05;
    int a_N = 2, a_grid = 2048;
    bool a_curve = false;
    auto* ann_cmd = app.add_subcommand("annulus-oracle", "radial annulus ground truth");
    ann_cmd->add_option("--delta", a_delta, "inner radius");
    ann_cmd->add_option("--c0", a_c0, "inner value");
    ann_cmd->add_option("--p", a_p, "exponent");
    ann_cmd->add_option("--eps", a_eps, "penalization parameter");
    ann_cmd->add_option("--N", a_N, "dimension (1 or 2)");
    ann_cmd->add_option("--grid", a_grid, "scan resolution");
    ann_cmd->add_flag("--curve", a_curve, "print the scan curve");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(solve_opts);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opts);
        if (verify_cmd->parsed()) return run_verify(verify_opts, checks);
        if (oracle_cmd->parsed()) {
            if (o_curve) {
                std::puts("s,energy");
                for (const auto& [s, e] : pfb::oracle_1d_scan(o_b, o_p, o_eps, o_alpha))
                    std::printf("%.17g,%.17g\n", s, e);
            }
            const auto res = pfb::oracle_1d_minimizer(o_b, o_p, o_eps, o_alpha, o_grid);
            std::printf("s_star=%.12g lambda_star=%.12g energy=%.12g branch=%s\n",
                        res.s_star, res.lambda_star, res.energy,
                        pfb::to_string(res.branch));
            return 0;
        }
        if (ann_cmd->parsed()) {
            if (a_curve) {
                std::puts("R,energy");
                for (const auto& [R, e] :
                     pfb::oracle_annulus_scan(a_delta, a_c0, a_p, a_N, a_eps))
                    std::printf("%.17g,%.17g\n", R, e);
            }
            const auto res =
                pfb::oracle_annulus_minimizer(a_delta, a_c0, a_p, a_N, a_eps, a_grid);
            std::printf("R_star=%.12g energy=%.12g\n", res.R_star, res.energy);
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
