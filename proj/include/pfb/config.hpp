#pragma once

#include <map>
#include <string>
#include <vector>

#include "pfb/free_boundary.hpp"
#include "pfb/solver.hpp"

namespace pfb {

enum class ProblemKind { interval_1d, square_2d, strip_2d, annulus_2d, halfdisk };

const char* to_string(ProblemKind k);

/// Closed-form boundary profile sampled pointwise along a segment. The
/// segment coordinate t is y on left/right segments and x on bottom/top.
struct SegmentProfile {
    enum class Kind {
        constant,       ///< a
        ramp,           ///< a * max(1 - t/b, 0)
        cosbump,        ///< a * (1 + b cos(2 pi t))
        linear_height,  ///< y
        capped_height   ///< y reduced by factor a on a cap of halfwidth c at angle b
    };
    Kind kind = Kind::constant;
    double a = 0.0, b = 0.0, c = 0.0;

    double eval(double x, double y, double t) const;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::interval_1d;
    int nx = 0, ny = 0;
    double h = 0.0;
    double inner_radius = 1.0, outer_radius = 2.0;
    double radius = 1.0;

    std::map<std::string, SegmentProfile> boundary;
    std::string contact_segment;
    double c0 = 0.0;

    double p = 2.0;
    double alpha = 0.0;
    std::vector<double> epsilon_list;
    SolverConfig solver;
    std::string output_dir;
    double vol_tol = 0.0;  ///< 0 = auto: two lattice layers along the FB
    bool warm_start = false;  ///< seed each sweep solve with the previous field

    double flatness_delta0 = 1.0 / 3.0;
    double flatness_cap_center = 1.5707963267948966;
    double flatness_cap_halfwidth = 0.39269908169872414;

    std::vector<std::string> verify_checks;
};

/// Parses "key = value" lines with dotted section prefixes and '#' comments.
/// Unknown keys, type mismatches, and constraint violations raise a parse
/// error naming the key and line. Missing keys take problem defaults.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "config");
RunConfig parse_config_file(const std::string& path);

struct Problem {
    DomainPtr domain;
    BoundaryData bdata;
};

/// Builds the lattice and the sampled Dirichlet datum for a penalized
/// problem. Throws for halfdisk configs (those drive the flatness check).
Problem build_problem(const RunConfig& config);

FlatnessConfig flatness_config(const RunConfig& config);

}  // namespace pfb
