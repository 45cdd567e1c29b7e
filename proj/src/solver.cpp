#include "pfb/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pfb {

void SolverConfig::validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("SolverConfig: need p > 1");
    if (!(tol_energy > 0.0)) throw std::invalid_argument("SolverConfig: tol_energy > 0");
    if (max_outer < 1 || relax_iters < 1 || toggle_passes < 1)
        throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
    if (eta < 0.0) throw std::invalid_argument("SolverConfig: eta >= 0");
}

namespace {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a * 1315423911ULL + b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Local one-variable view of the discrete p-energy around a node: the cells
// in which the node's value participates. All stencil nodes of an interior
// node carry values by construction.
struct NodalContext {
    const GridDomain& g;
    const std::vector<double>& u;
    double p, half_p, eta_val;  // eta_val = eta * h, in value units
    double scale;               // cell_measure / h^p
    bool quadratic;

    NodalContext(const GridDomain& gd, const std::vector<double>& data, double p_,
                 double eta)
        : g(gd),
          u(data),
          p(p_),
          half_p(0.5 * p_),
          eta_val(eta * gd.h),
          scale(gd.cell_measure() / std::pow(gd.h, p_)),
          quadratic(p_ == 2.0) {}

    // q^e for the exponents this solver actually runs hot with.
    double pow_q(double q, double e) const {
        if (e == 0.5) return std::sqrt(q);
        if (e == -0.25) return 1.0 / std::sqrt(std::sqrt(q));
        if (e == 1.5) return q * std::sqrt(q);
        if (e == 0.75) return std::sqrt(q * std::sqrt(q));
        return std::pow(q, e);
    }

    // Exact local energy of the (up to) three cells containing node (i,j),
    // with the node's value replaced by v.
    double phi(int i, int j, double v) const {
        const int nx = g.nx;
        const int node = j * nx + i;
        if (g.one_d) {
            const double a = u[node + 1] - v;
            const double b = v - u[node - 1];
            if (quadratic) return scale * (a * a + b * b);
            return scale * (std::pow(std::abs(a), p) + std::pow(std::abs(b), p));
        }
        const double uE = u[node + 1], uW = u[node - 1];
        const double uN = u[node + nx], uS = u[node - nx];
        const double uNW = u[node + nx - 1], uSE = u[node - nx + 1];
        const double ax = uE - v, ay = uN - v;            // cell (i, j)
        const double bx = v - uW, by = uNW - uW;          // cell (i-1, j)
        const double cx = uSE - uS, cy = v - uS;          // cell (i, j-1)
        const double qa = ax * ax + ay * ay;
        const double qb = bx * bx + by * by;
        const double qc = cx * cx + cy * cy;
        if (quadratic) return scale * (qa + qb + qc);
        auto pw = [&](double q) { return q > 0.0 ? pow_q(q, half_p) : 0.0; };
        return scale * (pw(qa) + pw(qb) + pw(qc));
    }

    // Eta-regularized first and second derivatives of phi in v.
    void dphi(int i, int j, double v, double& d1, double& d2) const {
        const int nx = g.nx;
        const int node = j * nx + i;
        const double e2 = eta_val * eta_val;
        d1 = 0.0;
        d2 = 0.0;
        auto add = [&](double gx, double gy, double dgx, double dgy) {
            const double q = gx * gx + gy * gy + e2;
            const double w = pow_q(q, half_p - 1.0);  // (q)^((p-2)/2)
            const double dot = gx * dgx + gy * dgy;
            d1 += p * w * dot;
            d2 += p * ((p - 2.0) * (q > 0.0 ? w / q : 0.0) * dot * dot +
                       w * (dgx * dgx + dgy * dgy));
        };
        if (g.one_d) {
            add(u[node + 1] - v, 0.0, -1.0, 0.0);
            add(v - u[node - 1], 0.0, 1.0, 0.0);
        } else {
            const double uE = u[node + 1], uW = u[node - 1];
            const double uN = u[node + nx], uS = u[node - nx];
            const double uNW = u[node + nx - 1], uSE = u[node - nx + 1];
            add(uE - v, uN - v, -1.0, -1.0);
            add(v - uW, uNW - uW, 1.0, 0.0);
            add(uSE - uS, v - uS, 0.0, 1.0);
        }
        d1 *= scale;
        d2 *= scale;
    }

    // Value minimizing phi. For p = 2 this is the average of the lattice
    // neighbors (the 5-point update); otherwise safeguarded Newton on the
    // regularized derivative, golden-section fallback. d1_start, when asked
    // for, reports the derivative at the warm start (used for cheap exact-
    // enough decrease accounting during sweeps).
    double minimizer(int i, int j, double* d1_start = nullptr) const {
        const int nx = g.nx;
        const int node = j * nx + i;
        if (g.one_d) {
            if (quadratic) return 0.5 * (u[node + 1] + u[node - 1]);
            return solve_1d(i, j, std::min(u[node + 1], u[node - 1]),
                            std::max(u[node + 1], u[node - 1]), d1_start);
        }
        const double uE = u[node + 1], uW = u[node - 1];
        const double uN = u[node + nx], uS = u[node - nx];
        if (quadratic) return 0.25 * (uE + uW + uN + uS);
        const double lo = std::min(std::min(uE, uW), std::min(uN, uS));
        const double hi = std::max(std::max(uE, uW), std::max(uN, uS));
        return solve_1d(i, j, lo, hi, d1_start);
    }

    double solve_1d(int i, int j, double lo, double hi, double* d1_start = nullptr) const {
        if (d1_start) *d1_start = 0.0;
        if (hi - lo < 1e-300) return lo;
        const double width_tol = 1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
        double v = u[g.idx(i, j)];
        if (!(v >= lo && v <= hi)) v = 0.5 * (lo + hi);
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
            double d1, d2;
            dphi(i, j, v, d1, d2);
            if (it == 0 && d1_start) *d1_start = d1;
            if (d1 > 0.0)
                hi = v;
            else
                lo = v;
            if (hi - lo < width_tol) {
                converged = true;
                break;
            }
            double step = (d2 > 0.0) ? -d1 / d2 : 0.0;
            double vn = v + step;
            if (!(vn > lo && vn < hi) || step == 0.0) vn = 0.5 * (lo + hi);
            if (std::abs(vn - v) < width_tol) {
                v = vn;
                converged = true;
                break;
            }
            v = vn;
        }
        if (!converged) {
            // Golden-section on the exact local energy.
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = phi(i, j, c), fd = phi(i, j, d);
            for (int it = 0; it < 80 && (b - a) > width_tol; ++it) {
                if (fc <= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gr * (b - a);
                    fc = phi(i, j, c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gr * (b - a);
                    fd = phi(i, j, d);
                }
            }
            v = 0.5 * (a + b);
        }
        return v;
    }
};

// One nodewise-minimization sweep; returns the exact local-energy decrease.
double relax_sweep(const GridDomain& g, std::vector<double>& data,
                   const std::vector<int>& active, const NodalContext& ctx) {
    double decrease = 0.0;
    const int nx = g.nx;
    for (int node : active) {
        const int i = node % nx, j = node / nx;
        const double v_old = data[node];
        if (ctx.quadratic) {
            double v_new;
            int k;
            if (g.one_d) {
                v_new = 0.5 * (data[node + 1] + data[node - 1]);
                k = 2;
            } else {
                v_new = 0.25 * (data[node + 1] + data[node - 1] + data[node + nx] +
                                data[node - nx]);
                k = 4;
            }
            const double diff = v_old - v_new;
            data[node] = v_new;
            decrease += ctx.scale * k * diff * diff;
        } else {
            double d1_old = 0.0;
            const double v_new = ctx.minimizer(i, j, &d1_old);
            data[node] = v_new;
            // The exact 1D minimum never raises phi; trapezoid estimate of
            // the drop is enough for the sweep stopping rule.
            decrease += 0.5 * std::abs(d1_old * (v_old - v_new));
        }
    }
    return decrease;
}

// Sweeps until the per-sweep decrease stalls (absolute or relative to the
// first sweep) or the cap is reached. Returns the total decrease.
double relax_until(const GridDomain& g, std::vector<double>& data,
                   const std::vector<int>& active, const NodalContext& ctx,
                   int max_sweeps, double stop_tol, double stop_ratio) {
    if (active.empty()) return 0.0;
    double total = 0.0, first = -1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double dec = relax_sweep(g, data, active, ctx);
        total += dec;
        if (first < 0.0) first = dec;
        if (dec <= stop_tol || dec <= stop_ratio * first) break;
    }
    return total;
}

std::vector<int> positive_interior(const GridDomain& g, const std::vector<double>& data) {
    std::vector<int> out;
    out.reserve(g.interior_list.size());
    for (int node : g.interior_list)
        if (data[node] > 0.0) out.push_back(node);
    return out;
}

bool has_nonpositive_nbr(const GridDomain& g, const std::vector<double>& data, int node) {
    const int i = node % g.nx, j = node / g.nx;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : dirs) {
        const int ii = i + d[0], jj = j + d[1];
        if (g.one_d && d[1] != 0) continue;
        if (g.in_closure(ii, jj) && data[g.idx(ii, jj)] <= 0.0) return true;
    }
    return false;
}

bool has_positive_nbr(const GridDomain& g, const std::vector<double>& data, int node) {
    const int i = node % g.nx, j = node / g.nx;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto& d : dirs) {
        const int ii = i + d[0], jj = j + d[1];
        if (g.one_d && d[1] != 0) continue;
        if (g.in_closure(ii, jj) && data[g.idx(ii, jj)] > 0.0) return true;
    }
    return false;
}

// One shuffled pass of single-node moves with exact energy deltas. The
// positive-node count is tracked as an integer so the penalty sees measure
// changes in exact quanta of h^N.
int toggle_pass(const GridDomain& g, std::vector<double>& data, const NodalContext& ctx,
                const PenaltyParams& params, std::uint64_t seed, long& pos_count) {
    std::vector<int> cands;
    for (int node : g.interior_list) {
        if (data[node] > 0.0) {
            if (has_nonpositive_nbr(g, data, node)) cands.push_back(node);
        } else if (has_positive_nbr(g, data, node)) {
            cands.push_back(node);
        }
    }
    if (cands.empty()) return 0;
    std::mt19937_64 rng(seed);
    std::shuffle(cands.begin(), cands.end(), rng);

    const double q = g.cell_measure();
    int accepted = 0;
    for (int node : cands) {
        const int i = node % g.nx, j = node / g.nx;
        const double v = data[node];
        if (v > 0.0) {
            if (!has_nonpositive_nbr(g, data, node)) continue;
            const double d_dir = ctx.phi(i, j, 0.0) - ctx.phi(i, j, v);
            const double d_pen = penalty((pos_count - 1) * q, params) -
                                 penalty(pos_count * q, params);
            if (d_dir + d_pen < 0.0) {
                data[node] = 0.0;
                --pos_count;
                ++accepted;
            }
        } else {
            if (!has_positive_nbr(g, data, node)) continue;
            const double v_new = ctx.minimizer(i, j);
            if (!(v_new > 0.0)) continue;
            const double d_dir = ctx.phi(i, j, v_new) - ctx.phi(i, j, v);
            const double d_pen = penalty((pos_count + 1) * q, params) -
                                 penalty(pos_count * q, params);
            if (d_dir + d_pen < 0.0) {
                data[node] = v_new;
                ++pos_count;
                ++accepted;
            }
        }
    }
    return accepted;
}

}  // namespace

ScalarField truncate_negative(const ScalarField& u) {
    ScalarField out = u;
    for (int node : out.dom().interior_list)
        if (out[node] < 0.0) out[node] = 0.0;
    return out;
}

ScalarField p_harmonic_relax(const ScalarField& u, const std::vector<int>& active,
                             const SolverConfig& config) {
    config.validate();
    const GridDomain& g = u.dom();
    for (int node : active)
        if (!g.is_interior(node))
            throw std::invalid_argument("p_harmonic_relax: active set must be interior");
    ScalarField out = u;
    NodalContext ctx(g, out.data, config.p, config.eta);
    relax_until(g, out.data, active, ctx, config.relax_iters,
                1e-15 * (1.0 + std::abs(dirichlet_p_energy(u, config.p))), 0.0);
    return out;
}

std::pair<ScalarField, double> harmonic_replacement(const ScalarField& u,
                                                    const std::vector<int>& ball,
                                                    const SolverConfig& config) {
    config.validate();
    if (ball.empty()) return {u, 0.0};
    const GridDomain& g = u.dom();
    for (int node : ball)
        if (!g.is_interior(node))
            throw std::invalid_argument("harmonic_replacement: ball must be interior");
    const double before = dirichlet_p_energy(u, config.p);
    ScalarField out = u;
    NodalContext ctx(g, out.data, config.p, config.eta);
    relax_until(g, out.data, ball, ctx, std::max(config.relax_iters, 8000),
                1e-15 * (1.0 + before), 0.0);
    const double after = dirichlet_p_energy(out, config.p);
    return {std::move(out), std::max(0.0, before - after)};
}

std::pair<ScalarField, int> toggle_sweep(const ScalarField& u, double p,
                                         const PenaltyParams& params,
                                         const SolverConfig& config) {
    params.validate();
    ScalarField out = u;
    NodalContext ctx(out.dom(), out.data, p, config.eta);
    long cnt = positive_node_count(out);
    const int accepted =
        toggle_pass(out.dom(), out.data, ctx, params, config.seed, cnt);
    return {std::move(out), accepted};
}

namespace {

struct LayerMover {
    const GridDomain& g;
    std::vector<double>& data;
    const NodalContext& ctx;
    const PenaltyParams& params;
    double p;
    int relax_cap;
    double stop_tol;

    EnergyBreakdown total(const ScalarField& f) const {
        return total_energy(f, p, params);
    }

    // Tentatively moves the whole free-boundary layer (retreat: zero every
    // positive node with a nonpositive neighbor; advance: free every zero
    // node adjacent to positivity), re-relaxes, and keeps the move iff the
    // exact total energy strictly drops. Otherwise restores the field.
    bool attempt(ScalarField& u, bool retreat, double current_total) {
        std::vector<int> layer;
        for (int node : g.interior_list) {
            if (retreat) {
                if (data[node] > 0.0 && has_nonpositive_nbr(g, data, node))
                    layer.push_back(node);
            } else {
                if (data[node] <= 0.0 && has_positive_nbr(g, data, node))
                    layer.push_back(node);
            }
        }
        if (layer.empty()) return false;
        const std::vector<double> saved = data;
        if (retreat) {
            for (int node : layer) data[node] = 0.0;
        } else {
            for (int node : layer) {
                const double v = ctx.minimizer(node % g.nx, node / g.nx);
                if (v > 0.0) data[node] = v;
            }
        }
        const std::vector<int> active = positive_interior(g, data);
        relax_until(g, data, active, ctx, relax_cap, stop_tol, 1e-5);
        const double candidate = total(u).total;
        if (candidate < current_total) return true;
        data = saved;
        return false;
    }

    // Zero-move candidates ranked by their exact unrelaxed removal cost:
    // protruding and block-edge nodes come first because removing them does
    // not create new interface area.
    std::vector<std::pair<double, int>> ranked_removals() const {
        std::vector<std::pair<double, int>> out;
        for (int node : g.interior_list) {
            if (data[node] <= 0.0 || !has_nonpositive_nbr(g, data, node)) continue;
            const int i = node % g.nx, j = node / g.nx;
            out.emplace_back(ctx.phi(i, j, 0.0) - ctx.phi(i, j, data[node]), node);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Free-move candidates ranked by their unrelaxed fill gain, best first:
    // indent corners and block edges fill almost for free.
    std::vector<std::pair<double, int>> ranked_fills() const {
        std::vector<std::pair<double, int>> out;
        for (int node : g.interior_list) {
            if (data[node] > 0.0 || !has_positive_nbr(g, data, node)) continue;
            const int i = node % g.nx, j = node / g.nx;
            const double v = ctx.minimizer(i, j);
            if (!(v > 0.0)) continue;
            out.emplace_back(ctx.phi(i, j, v) - ctx.phi(i, j, 0.0), node);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Positive nodes in the cross-shaped band around two centers: the rows
    // and columns within `pad` of either node. Re-relaxation confined there
    // captures the full re-slope of the affected lattice lines.
    std::vector<int> cross_band(int a, int b, int pad) const {
        const int ia = a % g.nx, ja = a / g.nx, ib = b % g.nx, jb = b / g.nx;
        std::vector<int> out;
        for (int node : g.interior_list) {
            if (data[node] <= 0.0) continue;
            const int i = node % g.nx, j = node / g.nx;
            if (std::abs(i - ia) <= pad || std::abs(i - ib) <= pad ||
                std::abs(j - ja) <= pad || std::abs(j - jb) <= pad)
                out.push_back(node);
        }
        return out;
    }

    // Measure-preserving exchanges: zero shallow free-boundary nodes and
    // free zero nodes ahead of the steepest ones, keeping a move iff the
    // exact total energy strictly drops after re-relaxation. These are the
    // moves that equalize the boundary flux once the volume is pinned at the
    // penalty kink, where every single-node change pays the kink slope.
    int attempt_exchange(ScalarField& u, double current_total) {
        int accepted = 0;

        // Coarse batch with global re-relaxation.
        {
            const auto removals = ranked_removals();
            const auto fills = ranked_fills();
            const int k = std::min<int>({std::max<int>(1, removals.size() / 8),
                                         static_cast<int>(removals.size()),
                                         static_cast<int>(fills.size())});
            if (k >= 2) {
                const std::vector<double> saved = data;
                for (int t = 0; t < k; ++t) data[removals[t].second] = 0.0;
                for (int t = 0; t < k; ++t) {
                    const int q = fills[t].second;
                    const double v = ctx.minimizer(q % g.nx, q / g.nx);
                    if (v > 0.0) data[q] = v;
                }
                const std::vector<int> active = positive_interior(g, data);
                relax_until(g, data, active, ctx, relax_cap, stop_tol, 1e-6);
                const double candidate = total(u).total;
                if (candidate < current_total) {
                    ++accepted;
                    current_total = candidate;
                } else {
                    data = saved;
                }
            }
        }

        // Fine moves with band-local re-relaxation and exact comparison:
        // removal-only and fill-only moves break the single-node hysteresis
        // away from the kink; measure-preserving pairs trade volume along
        // the front once it is pinned at the kink.
        for (int mode = 0; mode < 3; ++mode) {
            int rejects = 0;
            for (int round = 0; round < 96 && rejects < 4; ++round) {
                const auto removals = ranked_removals();
                const auto fills = ranked_fills();
                int a = -1, q = -1;
                if (mode == 0 || mode == 2) {
                    if (static_cast<int>(removals.size()) <= rejects) break;
                    a = removals[rejects].second;
                }
                if (mode == 1 || mode == 2) {
                    if (static_cast<int>(fills.size()) <= rejects) break;
                    q = fills[rejects].second;
                }
                if (a == q) break;
                const double va = (a >= 0) ? data[a] : 0.0;
                double vq = 0.0;
                if (q >= 0) {
                    vq = ctx.minimizer(q % g.nx, q / g.nx);
                    if (!(vq > 0.0)) break;
                }

                const std::vector<int> band =
                    cross_band(a >= 0 ? a : q, q >= 0 ? q : a, 8);
                std::vector<double> saved(band.size());
                for (std::size_t t = 0; t < band.size(); ++t) saved[t] = data[band[t]];

                if (a >= 0) data[a] = 0.0;
                if (q >= 0) data[q] = vq;
                std::vector<int> active;
                active.reserve(band.size() + 1);
                for (int node : band)
                    if (data[node] > 0.0) active.push_back(node);
                if (q >= 0 && std::find(active.begin(), active.end(), q) == active.end())
                    active.push_back(q);
                relax_until(g, data, active, ctx, 16000, 0.01 * stop_tol, 1e-7);

                const double candidate = total(u).total;
                if (candidate < current_total) {
                    ++accepted;
                    current_total = candidate;
                    rejects = 0;
                } else {
                    for (std::size_t t = 0; t < band.size(); ++t)
                        data[band[t]] = saved[t];
                    if (a >= 0) data[a] = va;
                    if (q >= 0) data[q] = 0.0;
                    ++rejects;
                }
            }
        }
        return accepted;
    }
};

}  // namespace

Solution solve_penalized(const DomainPtr& domain, const BoundaryData& bdata, double p,
                         const PenaltyParams& params, const SolverConfig& config_in,
                         const ScalarField* warm_start) {
    SolverConfig config = config_in;
    config.p = p;
    config.validate();
    bdata.validate();
    params.validate(*domain);
    const GridDomain& g = *domain;

    Solution sol;
    sol.p = p;
    sol.params = params;
    sol.field = make_admissible(bdata, 0.0);
    ScalarField& u = sol.field;

    const double eta =
        (config.eta > 0.0) ? config.eta : 1e-10 * bdata.max_value() / g.h;
    NodalContext ctx(g, u.data, p, eta);

    if (warm_start && warm_start->owner.get() == domain.get()) {
        for (int node : g.interior_list) u[node] = std::max((*warm_start)[node], 0.0);
    } else {
        // Relaxed p-harmonic extension of phi_0: positive initial candidate.
        const double ext_tol = 1e-11 * (1.0 + bdata.max_value());
        relax_until(g, u.data, g.interior_list, ctx, 4 * config.relax_iters, ext_tol,
                    1e-7);
        for (int node : g.interior_list)
            if (u[node] < 0.0) u[node] = 0.0;
    }

    EnergyBreakdown prev = total_energy(u, p, params);
    sol.trace.push_back({0, prev, 0});

    const double scale = 1.0 + std::abs(prev.total);
    const double relax_stop = 0.01 * config.tol_energy * scale;
    LayerMover mover{g, u.data, ctx, params, p, config.relax_iters, relax_stop};

    bool converged = false;
    for (int outer = 1; outer <= config.max_outer; ++outer) {
        for (int node : g.interior_list)
            if (u[node] < 0.0) u[node] = 0.0;
        const std::vector<int> active = positive_interior(g, u.data);
        relax_until(g, u.data, active, ctx, config.relax_iters, relax_stop, 1e-5);

        long cnt = positive_node_count(u);
        int toggles = 0;
        for (int pass = 1; pass <= config.toggle_passes; ++pass)
            toggles += toggle_pass(g, u.data, ctx, params,
                                   mix_seed(config.seed, outer, pass), cnt);

        int layer_moves = 0;
        EnergyBreakdown cur = total_energy(u, p, params);
        if (toggles == 0) {
            if (mover.attempt(u, /*retreat=*/true, cur.total) ||
                mover.attempt(u, /*retreat=*/false, cur.total) ||
                mover.attempt_exchange(u, cur.total)) {
                layer_moves = 1;
                cur = total_energy(u, p, params);
            }
        }

        // Exact arithmetic forbids an increase; recompute noise does not.
        if (cur.total > prev.total) {
            assert(cur.total - prev.total < 1e-10 * scale);
            cur = prev;
        }
        sol.trace.push_back({outer, cur, toggles + layer_moves});
        const double rel = (prev.total - cur.total) / std::max(1.0, std::abs(cur.total));
        prev = cur;
        if (toggles == 0 && layer_moves == 0 && rel < config.tol_energy) {
            converged = true;
            break;
        }
    }

    // Final polish on the converged positivity set.
    const std::vector<int> active = positive_interior(g, u.data);
    relax_until(g, u.data, active, ctx, 4 * config.relax_iters,
                1e-15 * scale, 0.0);
    EnergyBreakdown fin = total_energy(u, p, params);
    if (fin.total <= sol.trace.back().energy.total)
        sol.trace.push_back({sol.trace.back().iter + 1, fin, 0});

    sol.breakdown = fin;
    sol.lipschitz_estimate = lipschitz_estimate(u);
    sol.converged = converged;
    return sol;
}

}  // namespace pfb
