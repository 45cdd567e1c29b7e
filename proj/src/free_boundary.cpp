#include "pfb/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfb {

namespace {

bool interior_zero_nbr(const GridDomain& g, const ScalarField& u, int node) {
    const int i = node % g.nx, j = node / g.nx;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : dirs) {
        if (g.one_d && d[1] != 0) continue;
        const int ii = i + d[0], jj = j + d[1];
        if (!g.in_grid(ii, jj)) continue;
        const int q = g.idx(ii, jj);
        if (g.is_interior(q) && u[q] <= 0.0) return true;
    }
    return false;
}

double indicator(const GridDomain& g, const ScalarField& u, int i, int j, double fb) {
    if (!g.in_closure(i, j)) return fb;
    return u.at(i, j) > 0.0 ? 1.0 : 0.0;
}

std::array<double, 2> estimate_normal(const GridDomain& g, const ScalarField& u,
                                      int node) {
    const int i = node % g.nx, j = node / g.nx;
    if (g.one_d) {
        const double right =
            g.in_closure(i + 1, 0) ? (u.at(i + 1, 0) > 0.0 ? 1.0 : 0.0) : 1.0;
        return {right > 0.0 ? -1.0 : 1.0, 0.0};
    }
    const double self = 1.0;  // fb nodes are positive
    auto chi = [&](int di, int dj) { return indicator(g, u, i + di, j + dj, self); };
    // Sobel: the gradient of the 3x3-smoothed indicator.
    const double gx = (chi(1, -1) + 2.0 * chi(1, 0) + chi(1, 1)) -
                      (chi(-1, -1) + 2.0 * chi(-1, 0) + chi(-1, 1));
    const double gy = (chi(-1, 1) + 2.0 * chi(0, 1) + chi(1, 1)) -
                      (chi(-1, -1) + 2.0 * chi(0, -1) + chi(1, -1));
    const double norm = std::hypot(gx, gy);
    if (norm > 0.0) return {-gx / norm, -gy / norm};
    // Degenerate smoothed gradient: point at the first zero neighbor.
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : dirs) {
        const int ii = i + d[0], jj = j + d[1];
        if (g.in_closure(ii, jj) && u.at(ii, jj) <= 0.0)
            return {static_cast<double>(d[0]), static_cast<double>(d[1])};
    }
    return {1.0, 0.0};
}

}  // namespace

double bilinear_sample(const ScalarField& u, double x, double y, bool& ok) {
    const GridDomain& g = u.dom();
    ok = false;
    const double slack = 1e-9;
    const double fx = (x - g.origin_x) / g.h;
    if (fx < -slack || fx > g.nx - 1 + slack) return 0.0;
    if (g.one_d) {
        int i0 = static_cast<int>(std::floor(fx));
        i0 = std::clamp(i0, 0, g.nx - 2);
        if (!g.in_closure(i0, 0) || !g.in_closure(i0 + 1, 0)) return 0.0;
        const double t = fx - i0;
        ok = true;
        return (1.0 - t) * u.at(i0, 0) + t * u.at(i0 + 1, 0);
    }
    const double fy = (y - g.origin_y) / g.h;
    if (fy < -slack || fy > g.ny - 1 + slack) return 0.0;
    int i0 = static_cast<int>(std::floor(fx));
    int j0 = static_cast<int>(std::floor(fy));
    i0 = std::clamp(i0, 0, g.nx - 2);
    j0 = std::clamp(j0, 0, g.ny - 2);
    if (!g.in_closure(i0, j0) || !g.in_closure(i0 + 1, j0) ||
        !g.in_closure(i0, j0 + 1) || !g.in_closure(i0 + 1, j0 + 1))
        return 0.0;
    const double tx = fx - i0, ty = fy - j0;
    ok = true;
    return (1.0 - tx) * (1.0 - ty) * u.at(i0, j0) + tx * (1.0 - ty) * u.at(i0 + 1, j0) +
           (1.0 - tx) * ty * u.at(i0, j0 + 1) + tx * ty * u.at(i0 + 1, j0 + 1);
}

FreeBoundaryReport extract_free_boundary(const ScalarField& u) {
    const GridDomain& g = u.dom();
    FreeBoundaryReport rep;
    for (int node : g.interior_list)
        if (u[node] > 0.0 && interior_zero_nbr(g, u, node)) rep.fb_nodes.push_back(node);
    if (rep.fb_nodes.empty()) return rep;

    rep.normals.reserve(rep.fb_nodes.size());
    for (int node : rep.fb_nodes) rep.normals.push_back(estimate_normal(g, u, node));

    long edges = 0;
    for (int node : g.interior_list) {
        const int i = node % g.nx, j = node / g.nx;
        const bool pos = u[node] > 0.0;
        if (g.in_grid(i + 1, j) && g.is_interior(g.idx(i + 1, j)))
            if (pos != (u.at(i + 1, j) > 0.0)) ++edges;
        if (!g.one_d && g.in_grid(i, j + 1) && g.is_interior(g.idx(i, j + 1)))
            if (pos != (u.at(i, j + 1) > 0.0)) ++edges;
    }
    rep.perimeter = (g.one_d ? 1.0 : g.h) * static_cast<double>(edges);
    return rep;
}

FreeBoundaryReport estimate_lambda(const ScalarField& u) {
    FreeBoundaryReport rep = extract_free_boundary(u);
    const GridDomain& g = u.dom();
    if (rep.fb_nodes.empty())
        throw std::runtime_error("estimate_lambda: empty free boundary");

    rep.flux.resize(rep.fb_nodes.size(), 0.0);
    for (std::size_t k = 0; k < rep.fb_nodes.size(); ++k) {
        const int node = rep.fb_nodes[k];
        const double x = g.pos_x(node % g.nx), y = g.pos_y(node / g.nx);
        const auto& nu = rep.normals[k];
        bool ok = false;
        const double inward =
            bilinear_sample(u, x - g.h * nu[0], y - g.h * nu[1], ok);
        double f;
        if (ok) {
            f = (inward - u[node]) / g.h;
        } else {
            // Fall back to the steepest lattice ascent into positivity.
            f = 0.0;
            const int i = node % g.nx, j = node / g.nx;
            const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto& d : dirs) {
                if (g.one_d && d[1] != 0) continue;
                if (g.in_closure(i + d[0], j + d[1]))
                    f = std::max(f, (u.at(i + d[0], j + d[1]) - u[node]) / g.h);
            }
        }
        rep.flux[k] = std::abs(f);
    }

    double sum = 0.0, sumsq = 0.0;
    long n = 0;
    const double min_dist = 2.0 * g.h - 1e-12;
    for (std::size_t k = 0; k < rep.fb_nodes.size(); ++k) {
        if (g.dist_to_boundary(rep.fb_nodes[k]) < min_dist) continue;
        sum += rep.flux[k];
        sumsq += rep.flux[k] * rep.flux[k];
        ++n;
    }
    if (n == 0) {  // everything hugs the fixed boundary; use all fb nodes
        for (double f : rep.flux) {
            sum += f;
            sumsq += f * f;
        }
        n = static_cast<long>(rep.flux.size());
    }
    rep.lambda_mean = sum / n;
    rep.lambda_std = std::sqrt(std::max(0.0, sumsq / n - rep.lambda_mean * rep.lambda_mean));
    return rep;
}

FreeBoundaryReport density_ratios(const ScalarField& u, const std::vector<double>& radii) {
    FreeBoundaryReport rep = extract_free_boundary(u);
    const GridDomain& g = u.dom();
    for (int node : rep.fb_nodes) {
        const int ic = node % g.nx, jc = node / g.nx;
        const double cx = g.pos_x(ic), cy = g.pos_y(jc);
        const double safe = g.dist_to_boundary(node);
        for (double r : radii) {
            if (r < 4.0 * g.h - 1e-12 || r > safe) {
                rep.density_skipped.emplace_back(node, r);
                continue;
            }
            const int span = static_cast<int>(std::ceil(r / g.h));
            long total = 0, positive = 0;
            for (int dj = -span; dj <= span; ++dj) {
                if (g.one_d && dj != 0) continue;
                for (int di = -span; di <= span; ++di) {
                    const int ii = ic + di, jj = jc + dj;
                    if (!g.in_closure(ii, jj)) continue;
                    const double dx = di * g.h, dy = dj * g.h;
                    if (dx * dx + dy * dy > r * r) continue;
                    ++total;
                    if (u.at(ii, jj) > 0.0) ++positive;
                }
            }
            if (total > 0)
                rep.density_table.push_back(
                    {cx, cy, r, static_cast<double>(positive) / total});
        }
    }
    return rep;
}

std::pair<double, double> linear_growth_check(const ScalarField& u, int margin) {
    const GridDomain& g = u.dom();
    std::vector<std::array<double, 2>> zeros;
    for (int node : g.interior_list)
        if (u[node] <= 0.0)
            zeros.push_back({g.pos_x(node % g.nx), g.pos_y(node / g.nx)});
    for (int node : g.boundary_list)
        if (u[node] <= 0.0)
            zeros.push_back({g.pos_x(node % g.nx), g.pos_y(node / g.nx)});
    if (zeros.empty()) throw std::runtime_error("linear_growth_check: no zero nodes");

    const double min_bdist = margin * g.h - 1e-12;
    double c_low = std::numeric_limits<double>::infinity();
    double c_high = 0.0;
    long qualifying = 0;
    for (int node : g.interior_list) {
        if (u[node] <= 0.0) continue;
        if (g.dist_to_boundary(node) < min_bdist) continue;
        const double x = g.pos_x(node % g.nx), y = g.pos_y(node / g.nx);
        double d2 = std::numeric_limits<double>::infinity();
        for (const auto& z : zeros) {
            const double dx = z[0] - x, dy = z[1] - y;
            d2 = std::min(d2, dx * dx + dy * dy);
        }
        const double ratio = u[node] / std::sqrt(d2);
        c_low = std::min(c_low, ratio);
        c_high = std::max(c_high, ratio);
        ++qualifying;
    }
    if (qualifying == 0)
        throw std::runtime_error("linear_growth_check: no qualifying nodes");
    return {c_low, c_high};
}

GradientFit gradient_bound_fit(const ScalarField& u, const std::vector<double>& radii) {
    if (radii.size() < 3)
        throw std::invalid_argument("gradient_bound_fit: need at least 3 radii");
    const GridDomain& g = u.dom();
    const FreeBoundaryReport rep = estimate_lambda(u);
    const double lambda = rep.lambda_mean;

    // Nodal gradient magnitudes (central differences where available), taken
    // only where the full stencil lies in the positive phase; estimates that
    // straddle the kink say nothing about |grad u| on the positive side.
    ScalarField grad(u.owner, 0.0);
    std::vector<char> clean(g.node_count(), 0);
    for (int node : g.interior_list) {
        const int i = node % g.nx, j = node / g.nx;
        bool pos = u[node] > 0.0;
        const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : dirs) {
            if (g.one_d && d[1] != 0) continue;
            pos = pos && g.in_closure(i + d[0], j + d[1]) &&
                  u.at(i + d[0], j + d[1]) > 0.0;
        }
        if (!pos) continue;
        clean[node] = 1;
        double gx, gy = 0.0;
        if (g.in_closure(i + 1, j) && g.in_closure(i - 1, j))
            gx = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * g.h);
        else if (g.in_closure(i + 1, j))
            gx = (u.at(i + 1, j) - u[node]) / g.h;
        else
            gx = (u[node] - u.at(i - 1, j)) / g.h;
        if (!g.one_d) {
            if (g.in_closure(i, j + 1) && g.in_closure(i, j - 1))
                gy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * g.h);
            else if (g.in_closure(i, j + 1))
                gy = (u.at(i, j + 1) - u[node]) / g.h;
            else
                gy = (u[node] - u.at(i, j - 1)) / g.h;
        }
        grad[node] = std::hypot(gx, gy);
    }
    // Erode once more and stay clear of the fixed boundary: one-node-deep
    // estimates still feel the jagged front and the boundary staircase.
    std::vector<char> trusted(g.node_count(), 0);
    for (int node : g.interior_list) {
        if (!clean[node]) continue;
        if (g.dist_to_boundary(node) < 2.5 * g.h) continue;
        const int i = node % g.nx, j = node / g.nx;
        bool deep = true;
        const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : dirs) {
            if (g.one_d && d[1] != 0) continue;
            const int ii = i + d[0], jj = j + d[1];
            deep = deep && (!g.in_grid(ii, jj) || !g.is_interior(g.idx(ii, jj)) ||
                            clean[g.idx(ii, jj)]);
        }
        if (deep) trusted[node] = 1;
    }

    GradientFit fit;
    std::vector<double> xs, ys;
    for (double r : radii) {
        double m = 0.0;
        const int span = static_cast<int>(std::ceil(r / g.h));
        for (int node : rep.fb_nodes) {
            const int ic = node % g.nx, jc = node / g.nx;
            for (int dj = -span; dj <= span; ++dj) {
                if (g.one_d && dj != 0) continue;
                for (int di = -span; di <= span; ++di) {
                    const int ii = ic + di, jj = jc + dj;
                    if (!g.in_grid(ii, jj)) continue;
                    const int q = g.idx(ii, jj);
                    if (!g.is_interior(q) || !trusted[q]) continue;
                    const double dx = di * g.h, dy = dj * g.h;
                    if (dx * dx + dy * dy > r * r) continue;
                    m = std::max(m, grad[q]);
                }
            }
        }
        fit.curve.emplace_back(r, m);
        xs.push_back(std::log(r));
        ys.push_back(std::log(std::max(m / lambda - 1.0, 1e-12)));
    }

    bool all_flat = true;
    for (auto& [r, m] : fit.curve) all_flat = all_flat && (m <= lambda * (1.0 + 1e-9));
    if (all_flat) {
        fit.degenerate = true;
        return fit;
    }

    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double denom = n * sxx - sx * sx;
    fit.gamma = (denom != 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
    fit.C = std::exp((sy - fit.gamma * sx) / n);
    return fit;
}

ScalarField blowup_rescale(const ScalarField& u, const BlowupSpec& spec) {
    const GridDomain& g = u.dom();
    if (spec.rho < 4.0 * g.h - 1e-12)
        throw std::invalid_argument("blowup_rescale: need rho >= 4h");
    if (spec.resolution < 2)
        throw std::invalid_argument("blowup_rescale: resolution too small");

    const int m = spec.resolution;
    auto out_dom = std::make_shared<GridDomain>(
        *build_rectangle(2 * m + 1, g.one_d ? 1 : 2 * m + 1, 1.0 / m));
    out_dom->origin_x = -1.0;
    out_dom->origin_y = g.one_d ? 0.0 : -1.0;
    out_dom->one_d = g.one_d;

    ScalarField out(out_dom, 0.0);
    for (int node = 0; node < out_dom->node_count(); ++node) {
        if (!out_dom->in_closure(node)) continue;
        const double xi = out_dom->pos_x(node % out_dom->nx);
        const double zeta = g.one_d ? 0.0 : out_dom->pos_y(node / out_dom->nx);
        bool ok = false;
        const double val = bilinear_sample(u, spec.cx + spec.rho * xi,
                                           spec.cy + spec.rho * zeta, ok);
        if (!ok) throw std::runtime_error("blowup_rescale: ball exits the domain");
        out[node] = val / spec.rho;
    }
    return out;
}

PlaneFit plane_profile_fit(const ScalarField& v) {
    const GridDomain& g = v.dom();
    std::vector<std::array<double, 3>> pts;  // x, y, value
    double vmax = 0.0;
    for (int node = 0; node < g.node_count(); ++node) {
        if (!g.in_closure(node)) continue;
        const double x = g.pos_x(node % g.nx), y = g.one_d ? 0.0 : g.pos_y(node / g.nx);
        if (x * x + y * y > 1.0) continue;
        pts.push_back({x, y, v[node]});
        vmax = std::max(vmax, std::abs(v[node]));
    }
    if (pts.empty()) throw std::invalid_argument("plane_profile_fit: no nodes in ball");

    auto sup_for = [&](double theta, double lambda) {
        const double nx = std::cos(theta), ny = std::sin(theta);
        double worst = 0.0;
        for (const auto& pt : pts) {
            const double phi = std::max(-(pt[0] * nx + pt[1] * ny), 0.0);
            worst = std::max(worst, std::abs(pt[2] - lambda * phi));
        }
        return worst;
    };
    auto best_lambda = [&](double theta) {
        double lo = 0.0, hi = std::max(4.0 * vmax, 1e-12);
        for (int it = 0; it < 60; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (sup_for(theta, m1) <= sup_for(theta, m2))
                hi = m2;
            else
                lo = m1;
        }
        return 0.5 * (lo + hi);
    };

    const int steps = 360;
    double best_theta = 0.0, best_sup = std::numeric_limits<double>::infinity();
    for (int k = 0; k < steps; ++k) {
        const double theta = 2.0 * M_PI * k / steps;
        const double s = sup_for(theta, best_lambda(theta));
        if (s < best_sup) {
            best_sup = s;
            best_theta = theta;
        }
    }
    double lo = best_theta - 2.0 * M_PI / steps, hi = best_theta + 2.0 * M_PI / steps;
    for (int it = 0; it < 40; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (sup_for(m1, best_lambda(m1)) <= sup_for(m2, best_lambda(m2)))
            hi = m2;
        else
            lo = m1;
    }
    best_theta = 0.5 * (lo + hi);

    PlaneFit fit;
    fit.lambda = best_lambda(best_theta);
    fit.nu_x = std::cos(best_theta);
    fit.nu_y = std::sin(best_theta);
    fit.sup_dist = sup_for(best_theta, fit.lambda);
    return fit;
}

SlopeProfile halfplane_slope_profile(const ScalarField& u) {
    const GridDomain& g = u.dom();
    const double tol0 = 1e-12;
    double rmax = 0.0;
    std::vector<std::array<double, 3>> pts;  // x, y, value over y >= 0
    for (int node = 0; node < g.node_count(); ++node) {
        if (!g.in_closure(node)) continue;
        const double x = g.pos_x(node % g.nx), y = g.pos_y(node / g.nx);
        if (y < -0.5 * g.h) continue;
        if (u[node] < -tol0)
            throw std::invalid_argument("halfplane_slope_profile: field must be >= 0");
        if (std::abs(y) < 0.5 * g.h && std::abs(u[node]) > tol0)
            throw std::invalid_argument(
                "halfplane_slope_profile: field must vanish on the x_N = 0 row");
        pts.push_back({x, y, u[node]});
        if (y > 0.0) rmax = std::max(rmax, std::hypot(x, y));
    }
    const double R0 = std::min(1.0, rmax);

    SlopeProfile out;
    std::vector<double> alphas;
    for (int j = 0;; ++j) {
        const double r = R0 * std::pow(0.5, j);
        double a = 0.0;
        long n = 0;
        for (const auto& pt : pts) {
            if (pt[1] < 0.5 * g.h) continue;
            if (pt[0] * pt[0] + pt[1] * pt[1] > r * r) continue;
            a = std::max(a, pt[2] / pt[1]);
            ++n;
        }
        if (n < 4) break;
        alphas.push_back(a);
    }
    if (alphas.size() < 3)
        throw std::runtime_error("halfplane_slope_profile: fewer than 3 dyadic levels");
    out.alpha_est = *std::min_element(alphas.begin(), alphas.end());

    for (double frac : {0.4, 0.3, 0.2, 0.15, 0.1}) {
        const double r = R0 * frac;
        double worst = 0.0;
        for (const auto& pt : pts) {
            if (pt[0] * pt[0] + pt[1] * pt[1] > r * r) continue;
            worst = std::max(worst, std::abs(pt[2] - out.alpha_est * pt[1]));
        }
        out.residual_curve.emplace_back(r, worst / r);
    }
    return out;
}

FlatnessResult flatness_decay_check(const FlatnessConfig& config) {
    if (config.delta0 < 0.0 || config.delta0 > 1.0)
        throw std::invalid_argument("flatness_decay_check: delta0 must be in [0, 1]");
    DomainPtr dom = build_halfdisk(config.radius, config.h);
    const GridDomain& g = *dom;

    ScalarField u(dom, 0.0);
    const int arc_tag = g.tag_of("arc");
    for (int node : g.boundary_list) {
        if (g.boundary_tag[node] != arc_tag) continue;  // flat row stays 0
        const double x = g.pos_x(node % g.nx), y = g.pos_y(node / g.nx);
        if (y <= 0.0) continue;
        const double t = std::abs(std::atan2(y, x) - config.cap_center_angle);
        double factor = 1.0;
        if (t <= 0.5 * config.cap_halfwidth)
            factor = config.delta0;
        else if (t < config.cap_halfwidth)
            factor = config.delta0 +
                     (1.0 - config.delta0) * (t / config.cap_halfwidth - 0.5) * 2.0;
        u[node] = factor * y;
    }

    SolverConfig cfg = config.solver;
    cfg.p = config.p;
    if (cfg.eta <= 0.0) cfg.eta = 1e-10 * config.radius / config.h;
    cfg.relax_iters = std::max(cfg.relax_iters, 60000);
    ScalarField relaxed = p_harmonic_relax(u, g.interior_list, cfg);

    // Convergence probe: one more relaxation round must be a near no-op.
    SolverConfig probe = cfg;
    probe.relax_iters = 4;
    ScalarField again = p_harmonic_relax(relaxed, g.interior_list, probe);
    double drift = 0.0;
    for (int node : g.interior_list)
        drift = std::max(drift, std::abs(again[node] - relaxed[node]));

    FlatnessResult res;
    res.flagged = drift > 1e-6 * config.radius;
    res.field = std::move(again);

    const double quarter = 0.25 * config.radius;
    double gamma = 0.0;
    for (int node : g.interior_list) {
        const double x = g.pos_x(node % g.nx), y = g.pos_y(node / g.nx);
        if (y < 0.5 * g.h) continue;
        if (x * x + y * y > quarter * quarter) continue;
        gamma = std::max(gamma, res.field[node] / y);
    }
    res.gamma_measured = gamma;
    return res;
}

}  // namespace pfb
