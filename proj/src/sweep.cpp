#include "pfb/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "pfb/io.hpp"

namespace pfb {

double auto_vol_tol(const GridDomain& domain, double perimeter) {
    const double edges = domain.one_d ? perimeter : perimeter / domain.h;
    return 2.0 * domain.cell_measure() * std::max(edges, 1.0);
}

Solution solve_instance(const RunConfig& config, double epsilon) {
    const Problem prob = build_problem(config);
    PenaltyParams params{epsilon, config.alpha};
    return solve_penalized(prob.domain, prob.bdata, config.p, params, config.solver);
}

Solution solve_instance(const RunConfig& config, double epsilon, const Problem& prob,
                        const ScalarField* warm_start) {
    PenaltyParams params{epsilon, config.alpha};
    return solve_penalized(prob.domain, prob.bdata, config.p, params, config.solver,
                           warm_start);
}

namespace {

std::string eps_dir_name(double eps) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "eps_%g", eps);
    return buf;
}

std::string summary_csv(const ScalarField& field) {
    const GridDomain& g = field.dom();
    double lambda_mean = std::nan(""), lambda_std = std::nan("");
    double perimeter = 0.0, c_low = std::nan(""), c_high = std::nan("");
    double c_fit = std::nan(""), gamma_fit = std::nan("");
    try {
        const FreeBoundaryReport rep = estimate_lambda(field);
        lambda_mean = rep.lambda_mean;
        lambda_std = rep.lambda_std;
        perimeter = rep.perimeter;
    } catch (const std::exception&) {
        perimeter = extract_free_boundary(field).perimeter;
    }
    try {
        const auto growth = linear_growth_check(field, 3);
        c_low = growth.first;
        c_high = growth.second;
    } catch (const std::exception&) {
    }
    if (!g.one_d) {
        try {
            const GradientFit fit = gradient_bound_fit(
                field, {4 * g.h, 6 * g.h, 8 * g.h, 12 * g.h, 16 * g.h});
            if (!fit.degenerate) {
                c_fit = fit.C;
                gamma_fit = fit.gamma;
            } else {
                c_fit = 0.0;
                gamma_fit = 0.0;
            }
        } catch (const std::exception&) {
        }
    }
    std::string out = "lambda_mean,lambda_std,perimeter,c_low,C_high,C_fit,gamma_fit\n";
    out += format_double(lambda_mean) + "," + format_double(lambda_std) + "," +
           format_double(perimeter) + "," + format_double(c_low) + "," +
           format_double(c_high) + "," + format_double(c_fit) + "," +
           format_double(gamma_fit) + "\n";
    return out;
}

}  // namespace

void persist_run(const std::string& dir, const Solution& sol) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_text_file(dir + "/field.txt", dump_field(sol.field));
    write_text_file(dir + "/trace.csv", trace_csv(sol.trace));
    write_text_file(dir + "/summary.csv", summary_csv(sol.field));
    try {
        const FreeBoundaryReport rep = estimate_lambda(sol.field);
        write_text_file(dir + "/fb.csv", fb_csv(sol.field.dom(), rep));
    } catch (const std::exception&) {
        write_text_file(dir + "/fb.csv", "node,x,y,flux,nx,ny\n");
    }
    const GridDomain& g = sol.field.dom();
    const FreeBoundaryReport dens = density_ratios(
        sol.field, {4 * g.h, 8 * g.h, 12 * g.h, 16 * g.h});
    write_text_file(dir + "/density.csv", density_csv(dens));
}

SweepReport run_epsilon_sweep(const RunConfig& config) {
    std::vector<double> eps = config.epsilon_list;
    std::sort(eps.begin(), eps.end(), std::greater<double>());

    SweepReport report;
    const Problem prob_shared = build_problem(config);
    const bool persist = !config.output_dir.empty();
    if (persist) {
        std::filesystem::create_directories(config.output_dir);
        write_text_file(config.output_dir + "/mask.txt",
                        dump_mask(*prob_shared.domain));
    }

    ScalarField previous;
    for (double e : eps) {
        const Solution sol = solve_instance(
            config, e, prob_shared,
            (config.warm_start && previous.owner) ? &previous : nullptr);
        if (config.warm_start) previous = sol.field;
        SweepRow row;
        row.epsilon = e;
        row.positivity = sol.breakdown.positivity;
        row.vol_gap = std::abs(row.positivity - config.alpha);
        row.energy = sol.breakdown.total;
        row.iters = sol.trace.empty() ? 0 : sol.trace.back().iter;
        row.converged = sol.converged;
        try {
            const FreeBoundaryReport rep = estimate_lambda(sol.field);
            row.lambda_mean = rep.lambda_mean;
            row.lambda_std = rep.lambda_std;
            row.perimeter = rep.perimeter;
        } catch (const std::exception&) {
            row.lambda_mean = std::nan("");
            row.lambda_std = std::nan("");
            row.perimeter = extract_free_boundary(sol.field).perimeter;
        }
        const double tol = (config.vol_tol > 0.0)
                               ? config.vol_tol
                               : auto_vol_tol(sol.field.dom(), row.perimeter);
        row.attained = row.vol_gap <= tol;
        if (row.attained &&
            (!report.epsilon_attained || e > *report.epsilon_attained))
            report.epsilon_attained = e;
        report.rows.push_back(row);

        if (persist)
            persist_run(config.output_dir + "/" + eps_dir_name(e), sol);
    }

    if (persist) write_text_file(config.output_dir + "/sweep.csv", sweep_csv(report));
    return report;
}

std::string sweep_csv(const SweepReport& report) {
    std::string out =
        "epsilon,positivity,vol_gap,lambda_mean,lambda_std,energy,iters,converged\n";
    for (const auto& row : report.rows)
        out += format_double(row.epsilon) + "," + format_double(row.positivity) + "," +
               format_double(row.vol_gap) + "," + format_double(row.lambda_mean) + "," +
               format_double(row.lambda_std) + "," + format_double(row.energy) + "," +
               std::to_string(row.iters) + "," + (row.converged ? "1" : "0") + "\n";
    return out;
}

}  // namespace pfb
