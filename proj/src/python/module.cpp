#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pfb/io.hpp"
#include "pfb/verify.hpp"

namespace py = pybind11;
using namespace pfb;

namespace {

py::array_t<double> field_array(const ScalarField& u) {
    const GridDomain& g = u.dom();
    py::array_t<double> out({g.ny, g.nx});
    auto buf = out.mutable_unchecked<2>();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) buf(j, i) = u.at(i, j);
    return out;
}

BoundaryData uniform_boundary(DomainPtr dom, const std::map<std::string, double>& values,
                              const std::string& contact, double c0) {
    BoundaryData bdata(dom);
    for (int node : dom->boundary_list) {
        const std::string& seg = dom->segment_names[dom->boundary_tag[node]];
        const auto it = values.find(seg);
        if (it == values.end())
            throw std::invalid_argument("no value for segment '" + seg + "'");
        bdata.values[node] = it->second;
    }
    bdata.contact_tag = dom->tag_of(contact);
    bdata.c0 = c0;
    bdata.validate();
    return bdata;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grid solver for the penalized volume-constrained p-Dirichlet problem";

    py::class_<GridDomain, std::shared_ptr<GridDomain>>(m, "GridDomain")
        .def_readonly("nx", &GridDomain::nx)
        .def_readonly("ny", &GridDomain::ny)
        .def_readonly("h", &GridDomain::h)
        .def_property_readonly("interior_count",
                               [](const GridDomain& g) { return g.interior_list.size(); })
        .def_property_readonly("boundary_count",
                               [](const GridDomain& g) { return g.boundary_list.size(); })
        .def("measure", &GridDomain::measure)
        .def("__repr__", [](const GridDomain& g) {
            return "<GridDomain " + std::to_string(g.nx) + "x" + std::to_string(g.ny) +
                   " h=" + format_double(g.h) + ">";
        });

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init([](DomainPtr dom, double fill) { return ScalarField(dom, fill); }),
             py::arg("domain"), py::arg("fill") = 0.0)
        .def_property_readonly("domain",
                               [](const ScalarField& u) {
                                   return std::const_pointer_cast<GridDomain>(u.owner);
                               })
        .def("to_numpy", &field_array)
        .def("set_node", [](ScalarField& u, int i, int j, double v) { u.at(i, j) = v; })
        .def("get_node", [](const ScalarField& u, int i, int j) { return u.at(i, j); });

    py::class_<BoundaryData>(m, "BoundaryData")
        .def_readonly("c0", &BoundaryData::c0)
        .def_readonly("contact_tag", &BoundaryData::contact_tag);

    py::class_<PenaltyParams>(m, "PenaltyParams")
        .def(py::init([](double eps, double alpha) {
                 PenaltyParams p{eps, alpha};
                 p.validate();
                 return p;
             }),
             py::arg("epsilon"), py::arg("alpha"))
        .def_readonly("epsilon", &PenaltyParams::epsilon)
        .def_readonly("alpha", &PenaltyParams::alpha);

    py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
        .def_readonly("dirichlet", &EnergyBreakdown::dirichlet)
        .def_readonly("penalty", &EnergyBreakdown::penalty)
        .def_readonly("total", &EnergyBreakdown::total)
        .def_readonly("positivity", &EnergyBreakdown::positivity);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("p", &SolverConfig::p)
        .def_readwrite("eta", &SolverConfig::eta)
        .def_readwrite("max_outer", &SolverConfig::max_outer)
        .def_readwrite("relax_iters", &SolverConfig::relax_iters)
        .def_readwrite("tol_energy", &SolverConfig::tol_energy)
        .def_readwrite("toggle_passes", &SolverConfig::toggle_passes)
        .def_readwrite("seed", &SolverConfig::seed);

    py::class_<Solution>(m, "Solution")
        .def_readonly("breakdown", &Solution::breakdown)
        .def_readonly("lipschitz_estimate", &Solution::lipschitz_estimate)
        .def_readonly("converged", &Solution::converged)
        .def_property_readonly("field", [](const Solution& s) { return s.field; })
        .def_property_readonly("iterations", [](const Solution& s) {
            return s.trace.empty() ? 0 : s.trace.back().iter;
        })
        .def_property_readonly("trace_totals", [](const Solution& s) {
            std::vector<double> out;
            for (const auto& row : s.trace) out.push_back(row.energy.total);
            return out;
        });

    py::class_<FreeBoundaryReport>(m, "FreeBoundaryReport")
        .def_readonly("fb_nodes", &FreeBoundaryReport::fb_nodes)
        .def_readonly("flux", &FreeBoundaryReport::flux)
        .def_readonly("lambda_mean", &FreeBoundaryReport::lambda_mean)
        .def_readonly("lambda_std", &FreeBoundaryReport::lambda_std)
        .def_readonly("perimeter", &FreeBoundaryReport::perimeter)
        .def_property_readonly("density_table", [](const FreeBoundaryReport& r) {
            py::list rows;
            for (const auto& d : r.density_table)
                rows.append(py::make_tuple(d.cx, d.cy, d.r, d.ratio));
            return rows;
        });

    py::class_<Oracle1DResult>(m, "Oracle1DResult")
        .def_readonly("s_star", &Oracle1DResult::s_star)
        .def_readonly("lambda_star", &Oracle1DResult::lambda_star)
        .def_readonly("energy", &Oracle1DResult::energy)
        .def_property_readonly("branch", [](const Oracle1DResult& r) {
            return std::string(to_string(r.branch));
        });

    py::class_<AnnulusOracleResult>(m, "AnnulusOracleResult")
        .def_readonly("R_star", &AnnulusOracleResult::R_star)
        .def_readonly("energy", &AnnulusOracleResult::energy)
        .def("profile_value", [](const AnnulusOracleResult& r, double rr) {
            return r.profile.value(rr);
        });

    m.def(
        "build_rectangle",
        [](int nx, int ny, double h) {
            return std::const_pointer_cast<GridDomain>(build_rectangle(nx, ny, h));
        },
        py::arg("nx"), py::arg("ny"), py::arg("h"));
    m.def(
        "build_annulus",
        [](double inner, double outer, double h) {
            return std::const_pointer_cast<GridDomain>(build_annulus(inner, outer, h));
        },
        py::arg("inner_radius"), py::arg("outer_radius"), py::arg("h"));
    m.def(
        "build_halfdisk",
        [](double radius, double h) {
            return std::const_pointer_cast<GridDomain>(build_halfdisk(radius, h));
        },
        py::arg("radius"), py::arg("h"));
    m.def("uniform_boundary", &uniform_boundary, py::arg("domain"), py::arg("values"),
          py::arg("contact"), py::arg("c0"));
    m.def("positivity_measure", &positivity_measure);
    m.def("penalty", &penalty);
    m.def("dirichlet_p_energy", &dirichlet_p_energy);
    m.def("total_energy", &total_energy);
    m.def(
        "solve_penalized",
        [](const DomainPtr& domain, const BoundaryData& bdata, double p,
           const PenaltyParams& params, const SolverConfig& config) {
            return solve_penalized(domain, bdata, p, params, config);
        },
        py::arg("domain"), py::arg("bdata"), py::arg("p"), py::arg("params"),
        py::arg("config") = SolverConfig());
    m.def("extract_free_boundary", &extract_free_boundary);
    m.def("estimate_lambda", &estimate_lambda);
    m.def("density_ratios", &density_ratios, py::arg("field"), py::arg("radii"));
    m.def("linear_growth_check", &linear_growth_check, py::arg("field"),
          py::arg("margin") = 3);
    m.def(
        "blowup_rescale",
        [](const ScalarField& u, double cx, double cy, double rho, int resolution) {
            return blowup_rescale(u, {cx, cy, rho, resolution});
        },
        py::arg("field"), py::arg("cx"), py::arg("cy"), py::arg("rho"),
        py::arg("resolution") = 16);
    m.def("halfplane_slope_profile", [](const ScalarField& u) {
        const SlopeProfile prof = halfplane_slope_profile(u);
        return py::make_tuple(prof.alpha_est, prof.residual_curve);
    });
    m.def("oracle_1d_minimizer", &oracle_1d_minimizer, py::arg("b"), py::arg("p"),
          py::arg("epsilon"), py::arg("alpha"), py::arg("s_grid") = 4096);
    m.def("oracle_annulus_minimizer", &oracle_annulus_minimizer, py::arg("delta"),
          py::arg("c0"), py::arg("p"), py::arg("N"), py::arg("epsilon"),
          py::arg("R_grid") = 2048);
    m.def("parse_config_text", &parse_config_text, py::arg("text"),
          py::arg("origin") = std::string("config"));
    m.def("run_epsilon_sweep", [](const RunConfig& config) {
        const SweepReport report = run_epsilon_sweep(config);
        py::list rows;
        for (const auto& r : report.rows) {
            py::dict d;
            d["epsilon"] = r.epsilon;
            d["positivity"] = r.positivity;
            d["vol_gap"] = r.vol_gap;
            d["lambda_mean"] = r.lambda_mean;
            d["lambda_std"] = r.lambda_std;
            d["energy"] = r.energy;
            d["iters"] = r.iters;
            d["converged"] = r.converged;
            d["attained"] = r.attained;
            rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["epsilon_attained"] = report.epsilon_attained
                                      ? py::object(py::float_(*report.epsilon_attained))
                                      : py::object(py::none());
        return out;
    });

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("p", &RunConfig::p)
        .def_readonly("alpha", &RunConfig::alpha)
        .def_readonly("epsilon_list", &RunConfig::epsilon_list);
}
