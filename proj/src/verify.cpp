#include "pfb/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "pfb/io.hpp"

namespace pfb {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Mixed-form denominator for 1 < p <= 2: sum over cells of
// |grad w|^2 (|grad v| + |grad u|)^(p-2) h^N, with w = u - v.
double mixed_difference_energy(const ScalarField& u, const ScalarField& v, double p) {
    const GridDomain& g = u.dom();
    const double inv_h = 1.0 / g.h;
    const double cellm = g.cell_measure();
    double sum = 0.0;
    auto cell_grad = [&](const ScalarField& f, int i, int j, double& gx, double& gy) {
        const double base = f.at(i, j);
        gx = (f.at(i + 1, j) - base) * inv_h;
        gy = g.one_d ? 0.0 : (f.at(i, j + 1) - base) * inv_h;
    };
    const int jmax = g.one_d ? 1 : g.ny - 1;
    for (int j = 0; j < jmax; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            if (!g.in_closure(i, j) || !g.in_closure(i + 1, j)) continue;
            if (!g.one_d && !g.in_closure(i, j + 1)) continue;
            double ux, uy, vx, vy;
            cell_grad(u, i, j, ux, uy);
            cell_grad(v, i, j, vx, vy);
            const double wx = ux - vx, wy = uy - vy;
            const double w2 = wx * wx + wy * wy;
            if (w2 == 0.0) continue;
            const double mag = std::hypot(ux, uy) + std::hypot(vx, vy);
            sum += w2 * std::pow(mag, p - 2.0) * cellm;
        }
    }
    return sum;
}

ScalarField difference_field(const ScalarField& u, const ScalarField& v) {
    ScalarField w = u;
    for (std::size_t k = 0; k < w.data.size(); ++k) w.data[k] -= v.data[k];
    return w;
}

}  // namespace

double replacement_trials(double p, int trials, std::uint64_t seed) {
    const int n = 48;
    const double h = 1.0 / n;
    DomainPtr dom = build_rectangle(n, n, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SolverConfig cfg;
    cfg.p = p;
    cfg.relax_iters = 20000;
    double worst = std::numeric_limits<double>::infinity();

    const double extent = (n - 1) * h;
    for (int t = 0; t < trials; ++t) {
        // Positive background plus a few bumps centered inside a random ball.
        const double r = (5.0 + 5.0 * unif(rng)) * h;
        const double margin = r + 2.0 * h;
        const double cx = margin + (extent - 2.0 * margin) * unif(rng);
        const double cy = margin + (extent - 2.0 * margin) * unif(rng);

        ScalarField u(dom, 0.0);
        const double ax = 0.2 + 0.8 * unif(rng), ay = 0.2 + 0.8 * unif(rng);
        const double base = 0.3 + 0.7 * unif(rng);
        for (int node = 0; node < dom->node_count(); ++node) {
            if (!dom->in_closure(node)) continue;
            const double x = dom->pos_x(node % dom->nx), y = dom->pos_y(node / dom->nx);
            u[node] = base + ax * x + ay * (1.0 - y);
        }
        const int bumps = 1 + static_cast<int>(unif(rng) * 3.0);
        for (int b = 0; b < bumps; ++b) {
            const double bx = cx + (2.0 * unif(rng) - 1.0) * 0.5 * r;
            const double by = cy + (2.0 * unif(rng) - 1.0) * 0.5 * r;
            const double amp = 0.2 + 0.8 * unif(rng);
            const double w = (2.0 + unif(rng) * 4.0) * h;
            for (int node = 0; node < dom->node_count(); ++node) {
                if (!dom->in_closure(node)) continue;
                const double x = dom->pos_x(node % dom->nx),
                             y = dom->pos_y(node / dom->nx);
                const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                u[node] += amp * std::exp(-d2 / (2.0 * w * w));
            }
        }

        std::vector<int> ball;
        for (int node : dom->interior_list) {
            const double x = dom->pos_x(node % dom->nx), y = dom->pos_y(node / dom->nx);
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                ball.push_back(node);
        }
        if (ball.size() < 8) continue;

        const auto [v, drop] = harmonic_replacement(u, ball, cfg);
        const ScalarField w = difference_field(u, v);
        const double denom = (p >= 2.0) ? dirichlet_p_energy(w, p)
                                        : mixed_difference_energy(u, v, p);
        if (denom <= 1e-14) continue;
        worst = std::min(worst, drop / denom);
    }
    return worst;
}

double nondegeneracy_constant(const Solution& sol, double radius, int max_samples) {
    const ScalarField& u = sol.field;
    const GridDomain& g = u.dom();
    const FreeBoundaryReport rep = extract_free_boundary(u);
    SolverConfig cfg;
    cfg.p = sol.p;
    cfg.relax_iters = 20000;

    double worst = std::numeric_limits<double>::infinity();
    int used = 0;
    const std::size_t stride = std::max<std::size_t>(1, rep.fb_nodes.size() /
                                                            std::max(1, max_samples));
    for (std::size_t k = 0; k < rep.fb_nodes.size() && used < max_samples; k += stride) {
        const int node = rep.fb_nodes[k];
        if (g.dist_to_boundary(node) < radius + g.h) continue;
        const int ic = node % g.nx, jc = node / g.nx;
        std::vector<int> ball;
        long zero_count = 0, total = 0;
        double mean = 0.0;
        const int span = static_cast<int>(std::ceil(radius / g.h));
        for (int dj = -span; dj <= span; ++dj)
            for (int di = -span; di <= span; ++di) {
                const int ii = ic + di, jj = jc + dj;
                if (!g.in_closure(ii, jj)) continue;
                const double dx = di * g.h, dy = dj * g.h;
                if (dx * dx + dy * dy > radius * radius) continue;
                const int q = g.idx(ii, jj);
                ++total;
                mean += u[q];
                if (u[q] <= 0.0) ++zero_count;
                if (g.is_interior(q)) ball.push_back(q);
            }
        if (zero_count == 0 || total == 0) continue;
        mean /= static_cast<double>(total);
        if (mean <= 0.0) continue;

        const auto [v, drop] = harmonic_replacement(u, ball, cfg);
        (void)drop;
        const ScalarField w = difference_field(u, v);
        const double lhs = dirichlet_p_energy(w, sol.p);
        const double rhs_core = (g.cell_measure() * zero_count) *
                                std::pow(mean / radius, sol.p);
        if (rhs_core <= 0.0) continue;
        worst = std::min(worst, lhs / rhs_core);
        ++used;
    }
    if (used == 0) throw std::runtime_error("nondegeneracy: no usable fb balls");
    return worst;
}

namespace {

using Check = CheckResult (*)(const RunConfig&);

CheckResult check_penalty_inequality(const RunConfig& config) {
    CheckResult res{"penalty_inequality", true, false, ""};
    std::mt19937_64 rng(config.solver.seed + 7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double eps = config.epsilon_list.front();
    const PenaltyParams params{eps, config.alpha};
    long violations = 0;
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        double A = 2.0 * config.alpha * unif(rng);
        double B = 2.0 * config.alpha * unif(rng);
        if (A < B) std::swap(A, B);
        const double lhs = penalty(A, params) - penalty(B, params);
        const double rhs = (A - B) / eps;
        // Rounding allowance only: the steep branch makes this an equality.
        const double ulps = 4.0 * std::numeric_limits<double>::epsilon() *
                            std::max({std::abs(lhs), std::abs(rhs), 1.0});
        if (lhs > rhs + ulps) {
            ++violations;
            worst = std::max(worst, lhs - rhs);
        }
    }
    res.pass = violations == 0;
    res.measured = "violations=" + std::to_string(violations) +
                   " worst_excess=" + fmt(worst);
    return res;
}

CheckResult check_energy_monotonic(const RunConfig& config) {
    CheckResult res{"energy_monotonic", true, false, ""};
    const Solution sol = solve_instance(config, config.epsilon_list.front());
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& row : sol.trace) {
        ok = ok && row.energy.total <= prev;
        prev = row.energy.total;
    }
    res.pass = ok;
    res.measured = "rows=" + std::to_string(sol.trace.size()) +
                   " final_total=" + fmt(sol.breakdown.total) +
                   " converged=" + (sol.converged ? "1" : "0");
    return res;
}

CheckResult check_replacement(const RunConfig& config) {
    CheckResult res{"replacement", true, false, ""};
    std::ostringstream detail;
    for (double p : {1.5, 2.0, 3.0}) {
        const double worst = replacement_trials(p, 25, config.solver.seed + 11);
        detail << "p=" << p << " min_ratio=" << fmt(worst) << "; ";
        res.pass = res.pass && worst >= 1e-3;
    }
    res.measured = detail.str();
    return res;
}

CheckResult check_density(const RunConfig& config) {
    CheckResult res{"density", true, false, ""};
    const Solution sol = solve_instance(config, config.epsilon_list.front());
    const GridDomain& g = sol.field.dom();
    const FreeBoundaryReport rep = density_ratios(
        sol.field, {4 * g.h, 8 * g.h, 12 * g.h, 16 * g.h});
    double lo = 1.0, hi = 0.0;
    for (const auto& row : rep.density_table) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    res.pass = !rep.density_table.empty() && lo >= 0.05 && hi <= 0.95;
    res.measured = "rows=" + std::to_string(rep.density_table.size()) +
                   " min=" + fmt(lo) + " max=" + fmt(hi);
    return res;
}

CheckResult check_lambda_constancy(const RunConfig& config) {
    CheckResult res{"lambda_constancy", true, false, ""};
    const Solution sol = solve_instance(config, config.epsilon_list.front());
    const FreeBoundaryReport rep = estimate_lambda(sol.field);
    const double spread = rep.lambda_std / rep.lambda_mean;
    res.pass = spread < 0.1;
    res.measured = "lambda=" + fmt(rep.lambda_mean) + " spread=" + fmt(spread);
    return res;
}

CheckResult check_lambda_uniform(const RunConfig& config) {
    CheckResult res{"lambda_uniform", true, false, ""};
    RunConfig quiet = config;
    quiet.output_dir.clear();
    const SweepReport report = run_epsilon_sweep(quiet);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : report.rows) {
        if (!std::isfinite(row.lambda_mean)) continue;
        lo = std::min(lo, row.lambda_mean);
        hi = std::max(hi, row.lambda_mean);
    }
    res.pass = std::isfinite(lo) && lo > 0.0 && hi / lo <= 10.0;
    res.measured = "lambda_min=" + fmt(lo) + " lambda_max=" + fmt(hi);
    return res;
}

CheckResult check_volume_upper(const RunConfig& config) {
    CheckResult res{"volume_upper", true, false, ""};
    RunConfig quiet = config;
    quiet.output_dir.clear();
    const SweepReport report = run_epsilon_sweep(quiet);
    const Problem prob = build_problem(quiet);
    const double h = prob.domain->h;
    double C_fit = 0.0;
    for (const auto& row : report.rows) {
        const double slack = row.positivity - config.alpha - 4.0 * h * row.perimeter;
        if (slack > 0.0) C_fit = std::max(C_fit, slack / row.epsilon);
    }
    res.pass = C_fit < 100.0;
    res.measured = "C_fit=" + fmt(C_fit);
    return res;
}

CheckResult check_nondegeneracy(const RunConfig& config) {
    CheckResult res{"nondegeneracy", true, false, ""};
    const Solution sol = solve_instance(config, config.epsilon_list.front());
    const double r = 6.0 * sol.field.dom().h;
    const double c = nondegeneracy_constant(sol, r, 12);
    res.pass = c > 0.0;
    res.measured = "C_min=" + fmt(c);
    return res;
}

CheckResult check_blowup(const RunConfig& config) {
    CheckResult res{"blowup", true, false, ""};
    const Solution sol = solve_instance(config, config.epsilon_list.front());
    const GridDomain& g = sol.field.dom();
    const FreeBoundaryReport rep = extract_free_boundary(sol.field);
    if (rep.fb_nodes.empty()) throw std::runtime_error("no free boundary");
    // Flattest available fb point: mid-height.
    int center = rep.fb_nodes.front();
    double best = std::numeric_limits<double>::infinity();
    for (int node : rep.fb_nodes) {
        const double y = g.pos_y(node / g.nx);
        const double target = g.origin_y + 0.5 * (g.ny - 1) * g.h;
        if (std::abs(y - target) < best && g.dist_to_boundary(node) > 0.25) {
            best = std::abs(y - target);
            center = node;
        }
    }
    // Blow-up center: the zero crossing next to the chosen fb node, so the
    // fitted profile's kink through the origin matches the lattice field.
    const FreeBoundaryReport lam = estimate_lambda(sol.field);
    std::array<double, 2> nu{1.0, 0.0};
    for (std::size_t k = 0; k < lam.fb_nodes.size(); ++k)
        if (lam.fb_nodes[k] == center) nu = lam.normals[k];
    const double cx = g.pos_x(center % g.nx) + g.h * nu[0];
    const double cy = g.pos_y(center / g.nx) + g.h * nu[1];
    std::ostringstream detail;
    double prev_dist = std::numeric_limits<double>::infinity();
    bool monotone = true, confined = true;
    double final_dist = 0.0;
    for (double rho : {0.2, 0.1, 0.05}) {
        const ScalarField resc = blowup_rescale(sol.field, {cx, cy, rho, 24});
        const PlaneFit fit = plane_profile_fit(resc);
        monotone = monotone && fit.sup_dist <= prev_dist;
        prev_dist = fit.sup_dist;
        final_dist = fit.sup_dist;
        if (rho != 0.05) {
            detail << "rho=" << rho << " dist=" << fmt(fit.sup_dist) << "; ";
            continue;
        }
        // One-side confinement of the limit rescale past its fitted plane.
        const GridDomain& rg = resc.dom();
        const double pad = 2.0 / 24.0;
        for (int node : rg.interior_list) {
            if (resc[node] <= 0.0) continue;
            const double x = rg.pos_x(node % rg.nx), y = rg.pos_y(node / rg.nx);
            if (x * x + y * y > 1.0) continue;
            if (x * fit.nu_x + y * fit.nu_y > pad) confined = false;
        }
        detail << "rho=" << rho << " dist=" << fmt(fit.sup_dist) << "; ";
    }
    res.pass = monotone && confined && final_dist <= 5.0 * g.h / 0.05;
    detail << (confined ? "one-sided" : "NOT one-sided");
    res.measured = detail.str();
    return res;
}

CheckResult check_flatness(const RunConfig& config) {
    CheckResult res{"flatness", true, false, ""};
    FlatnessConfig f = flatness_config(config);
    const FlatnessResult reduced = flatness_decay_check(f);
    FlatnessConfig ctrl = f;
    ctrl.delta0 = 1.0;
    const FlatnessResult control = flatness_decay_check(ctrl);
    res.pass = !reduced.flagged && reduced.gamma_measured < 1.0 &&
               std::abs(control.gamma_measured - 1.0) <= 3.0 * f.h;
    res.measured = "gamma=" + fmt(reduced.gamma_measured) +
                   " control=" + fmt(control.gamma_measured) +
                   " margin=" + fmt(1.0 - reduced.gamma_measured);
    return res;
}

CheckResult check_asymptotic(const RunConfig& config) {
    CheckResult res{"asymptotic", true, false, ""};
    const FlatnessResult flat = flatness_decay_check(flatness_config(config));
    const SlopeProfile prof = halfplane_slope_profile(flat.field);
    double r04 = 0.0, r01 = 0.0;
    for (const auto& [r, v] : prof.residual_curve) {
        if (std::abs(r - 0.4) < 1e-9) r04 = v;
        if (std::abs(r - 0.1) < 1e-9) r01 = v;
    }
    res.pass = r01 > 0.0 ? (r04 / r01 >= 2.0) : true;
    res.measured = "alpha=" + fmt(prof.alpha_est) + " res(0.4)=" + fmt(r04) +
                   " res(0.1)=" + fmt(r01);
    return res;
}

CheckResult check_determinism(const RunConfig& config) {
    CheckResult res{"determinism", true, false, ""};
    const Solution a = solve_instance(config, config.epsilon_list.front());
    const Solution b = solve_instance(config, config.epsilon_list.front());
    const bool fields = dump_field(a.field) == dump_field(b.field);
    const bool traces = trace_csv(a.trace) == trace_csv(b.trace);
    res.pass = fields && traces;
    res.measured = std::string("fields=") + (fields ? "equal" : "DIFFER") +
                   " traces=" + (traces ? "equal" : "DIFFER");
    return res;
}

const std::vector<std::pair<std::string, Check>>& check_table() {
    static const std::vector<std::pair<std::string, Check>> table = {
        {"penalty_inequality", check_penalty_inequality},
        {"energy_monotonic", check_energy_monotonic},
        {"replacement", check_replacement},
        {"density", check_density},
        {"lambda_constancy", check_lambda_constancy},
        {"lambda_uniform", check_lambda_uniform},
        {"volume_upper", check_volume_upper},
        {"nondegeneracy", check_nondegeneracy},
        {"blowup", check_blowup},
        {"flatness", check_flatness},
        {"asymptotic", check_asymptotic},
        {"determinism", check_determinism},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : check_table()) out.push_back(name);
        return out;
    }();
    return names;
}

std::vector<CheckResult> run_verification_suite(const RunConfig& config,
                                                const std::vector<std::string>& checks) {
    std::vector<CheckResult> results;
    for (const std::string& name : checks) {
        const auto& table = check_table();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const auto& e) { return e.first == name; });
        CheckResult res;
        if (it == table.end()) {
            res = {name, false, true, "unknown check"};
        } else {
            try {
                res = it->second(config);
            } catch (const std::exception& ex) {
                res = {name, false, true, std::string("error: ") + ex.what()};
            }
        }
        results.push_back(std::move(res));
    }
    return results;
}

std::string verification_csv(const std::vector<CheckResult>& results) {
    std::string out = "check,pass,errored,measured\n";
    for (const auto& r : results) {
        std::string quoted = r.measured;
        std::replace(quoted.begin(), quoted.end(), ',', ';');
        out += r.name + "," + (r.pass ? "1" : "0") + "," + (r.errored ? "1" : "0") + "," +
               quoted + "\n";
    }
    return out;
}

}  // namespace pfb
