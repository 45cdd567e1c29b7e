#include "pfb/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace pfb {

void PenaltyParams::validate() const {
    if (!(epsilon > 0.0) || !(epsilon <= 1.0))
        throw std::invalid_argument("PenaltyParams: need 0 < epsilon <= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("PenaltyParams: need alpha > 0");
}

void PenaltyParams::validate(const GridDomain& domain) const {
    validate();
    if (!(alpha < domain.measure()))
        throw std::invalid_argument("PenaltyParams: need alpha < measure of the domain");
}

double penalty(double s, const PenaltyParams& params) {
    const double d = s - params.alpha;
    return (s < params.alpha) ? params.epsilon * d : d / params.epsilon;
}

double dirichlet_p_energy(const ScalarField& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("dirichlet_p_energy: need p > 1");
    const GridDomain& g = u.dom();
    const double inv_h = 1.0 / g.h;
    const double cellm = g.cell_measure();
    double sum = 0.0;

    if (g.one_d) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            if (!g.in_closure(i, 0) || !g.in_closure(i + 1, 0)) continue;
            const double gx = (u.at(i + 1, 0) - u.at(i, 0)) * inv_h;
            if (gx != 0.0) sum += std::pow(std::abs(gx), p) * cellm;
        }
        return sum;
    }

    const bool quadratic = (p == 2.0);
    const double half_p = 0.5 * p;
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            if (!g.in_closure(i, j) || !g.in_closure(i + 1, j) || !g.in_closure(i, j + 1))
                continue;
            const double base = u.at(i, j);
            const double gx = (u.at(i + 1, j) - base) * inv_h;
            const double gy = (u.at(i, j + 1) - base) * inv_h;
            const double g2 = gx * gx + gy * gy;
            if (g2 == 0.0) continue;
            sum += (quadratic ? g2 : std::pow(g2, half_p)) * cellm;
        }
    }
    return sum;
}

EnergyBreakdown total_energy(const ScalarField& u, double p, const PenaltyParams& params) {
    EnergyBreakdown out;
    out.dirichlet = dirichlet_p_energy(u, p);
    out.positivity = positivity_measure(u);
    out.penalty = penalty(out.positivity, params);
    out.total = out.dirichlet + out.penalty;
    return out;
}

namespace {

inline double edge_coeff(double g2, double eta, double p) {
    if (p == 2.0) return 1.0;
    return std::pow(g2 + eta * eta, 0.5 * (p - 2.0));
}

}  // namespace

ResidualReport p_laplacian_residual(const ScalarField& u, double p, double eta) {
    if (eta < 0.0) throw std::invalid_argument("p_laplacian_residual: need eta >= 0");
    const GridDomain& g = u.dom();
    ResidualReport out;
    out.field = ScalarField(u.owner, 0.0);
    const double inv_h = 1.0 / g.h;
    const double inv_h2 = inv_h * inv_h;

    if (g.one_d) {
        for (int i = 1; i + 1 < g.nx; ++i) {
            const int node = g.idx(i, 0);
            if (!g.is_interior(node)) continue;
            bool pos = true;
            for (int di = -1; di <= 1; ++di)
                pos = pos && g.in_closure(i + di, 0) && u.at(i + di, 0) > 0.0;
            if (!pos) continue;
            const double ge = (u.at(i + 1, 0) - u.at(i, 0)) * inv_h;
            const double gw = (u.at(i - 1, 0) - u.at(i, 0)) * inv_h;
            const double r =
                (edge_coeff(ge * ge, eta, p) * (u.at(i + 1, 0) - u.at(i, 0)) +
                 edge_coeff(gw * gw, eta, p) * (u.at(i - 1, 0) - u.at(i, 0))) *
                inv_h2;
            out.field[node] = r;
            out.nodes.push_back(node);
            out.max_abs = std::max(out.max_abs, std::abs(r));
        }
        return out;
    }

    for (int j = 1; j + 1 < g.ny; ++j) {
        for (int i = 1; i + 1 < g.nx; ++i) {
            const int node = g.idx(i, j);
            if (!g.is_interior(node)) continue;
            bool pos = true;
            for (int dj = -1; dj <= 1 && pos; ++dj)
                for (int di = -1; di <= 1 && pos; ++di)
                    pos = g.in_closure(i + di, j + dj) && u.at(i + di, j + dj) > 0.0;
            if (!pos) continue;

            const double c = u.at(i, j);
            // Transverse derivative averaged at the two edge endpoints.
            auto tv_y = [&](int ii) {
                return (u.at(ii, j + 1) - u.at(ii, j - 1)) * 0.5 * inv_h;
            };
            auto tv_x = [&](int jj) {
                return (u.at(i + 1, jj) - u.at(i - 1, jj)) * 0.5 * inv_h;
            };
            double r = 0.0;
            {  // east
                const double gx = (u.at(i + 1, j) - c) * inv_h;
                const double gy = 0.5 * (tv_y(i) + tv_y(i + 1));
                r += edge_coeff(gx * gx + gy * gy, eta, p) * (u.at(i + 1, j) - c);
            }
            {  // west
                const double gx = (u.at(i - 1, j) - c) * inv_h;
                const double gy = 0.5 * (tv_y(i) + tv_y(i - 1));
                r += edge_coeff(gx * gx + gy * gy, eta, p) * (u.at(i - 1, j) - c);
            }
            {  // north
                const double gy = (u.at(i, j + 1) - c) * inv_h;
                const double gx = 0.5 * (tv_x(j) + tv_x(j + 1));
                r += edge_coeff(gx * gx + gy * gy, eta, p) * (u.at(i, j + 1) - c);
            }
            {  // south
                const double gy = (u.at(i, j - 1) - c) * inv_h;
                const double gx = 0.5 * (tv_x(j) + tv_x(j - 1));
                r += edge_coeff(gx * gx + gy * gy, eta, p) * (u.at(i, j - 1) - c);
            }
            r *= inv_h2;
            out.field[node] = r;
            out.nodes.push_back(node);
            out.max_abs = std::max(out.max_abs, std::abs(r));
        }
    }
    return out;
}

}  // namespace pfb
