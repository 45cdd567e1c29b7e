#include "pfb/config.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pfb/io.hpp"

namespace pfb {

const char* to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::interval_1d: return "interval_1d";
        case ProblemKind::square_2d: return "square_2d";
        case ProblemKind::strip_2d: return "strip_2d";
        case ProblemKind::annulus_2d: return "annulus_2d";
        case ProblemKind::halfdisk: return "halfdisk";
    }
    return "?";
}

double SegmentProfile::eval(double x, double y, double t) const {
    switch (kind) {
        case Kind::constant: return a;
        case Kind::ramp: return a * std::max(1.0 - t / b, 0.0);
        case Kind::cosbump: return a * (1.0 + b * std::cos(2.0 * M_PI * t));
        case Kind::linear_height: return std::max(y, 0.0);
        case Kind::capped_height: {
            if (y <= 0.0) return 0.0;
            const double d = std::abs(std::atan2(y, x) - b);
            double factor = 1.0;
            if (d <= 0.5 * c)
                factor = a;
            else if (d < c)
                factor = a + (1.0 - a) * (d / c - 0.5) * 2.0;
            return factor * y;
        }
    }
    return 0.0;
}

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        fail(origin, line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& origin, int line, const std::string& key,
              const std::string& v) {
    try {
        std::size_t pos = 0;
        const int d = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        fail(origin, line, "key '" + key + "': expected an integer, got '" + v + "'");
    }
}

SegmentProfile parse_profile(const std::string& origin, int line, const std::string& key,
                             const std::string& v) {
    std::istringstream in(v);
    std::string name;
    in >> name;
    SegmentProfile prof;
    auto want = [&](int n) {
        std::vector<double> args;
        double d;
        while (in >> d) args.push_back(d);
        if (static_cast<int>(args.size()) != n)
            fail(origin, line,
                 "key '" + key + "': profile '" + name + "' takes " + std::to_string(n) +
                     " parameter(s)");
        return args;
    };
    if (name == "const") {
        prof.kind = SegmentProfile::Kind::constant;
        prof.a = want(1)[0];
    } else if (name == "ramp") {
        auto a = want(2);
        prof.kind = SegmentProfile::Kind::ramp;
        prof.a = a[0];
        prof.b = a[1];
        if (prof.b <= 0.0) fail(origin, line, "key '" + key + "': ramp length must be > 0");
    } else if (name == "cosbump") {
        auto a = want(2);
        prof.kind = SegmentProfile::Kind::cosbump;
        prof.a = a[0];
        prof.b = a[1];
    } else if (name == "linear_height") {
        want(0);
        prof.kind = SegmentProfile::Kind::linear_height;
    } else if (name == "capped_height") {
        auto a = want(3);
        prof.kind = SegmentProfile::Kind::capped_height;
        prof.a = a[0];
        prof.b = a[1];
        prof.c = a[2];
    } else {
        fail(origin, line, "key '" + key + "': unknown profile '" + name + "'");
    }
    return prof;
}

void fill_defaults(RunConfig& c) {
    const bool annulus = c.problem == ProblemKind::annulus_2d;
    const bool halfdisk = c.problem == ProblemKind::halfdisk;
    switch (c.problem) {
        case ProblemKind::interval_1d:
            if (c.nx == 0) c.nx = 256;
            c.ny = 1;
            if (c.h == 0.0) c.h = 1.0 / c.nx;
            if (c.alpha == 0.0) c.alpha = 0.5;
            break;
        case ProblemKind::square_2d:
            if (c.nx == 0) c.nx = 64;
            if (c.ny == 0) c.ny = c.nx;
            if (c.h == 0.0) c.h = 1.0 / c.nx;
            if (c.alpha == 0.0) c.alpha = 0.3;
            break;
        case ProblemKind::strip_2d:
            if (c.nx == 0) c.nx = 128;
            if (c.ny == 0) c.ny = c.nx + 2;
            if (c.h == 0.0) c.h = 1.0 / c.nx;
            if (c.alpha == 0.0) c.alpha = 0.5;
            break;
        case ProblemKind::annulus_2d:
            if (c.h == 0.0) c.h = 1.0 / 32;
            if (c.alpha == 0.0) c.alpha = 0.5;
            break;
        case ProblemKind::halfdisk:
            if (c.h == 0.0) c.h = 1.0 / 96;
            if (c.alpha == 0.0) c.alpha = 0.5;  // unused, keeps validation happy
            break;
    }
    if (c.epsilon_list.empty()) c.epsilon_list = {0.5, 0.36, 0.25, 0.1, 0.01};

    auto set_default = [&](const std::string& seg, SegmentProfile prof) {
        if (!c.boundary.count(seg)) c.boundary[seg] = prof;
    };
    SegmentProfile one{SegmentProfile::Kind::constant, 1.0, 0.0, 0.0};
    SegmentProfile zero{SegmentProfile::Kind::constant, 0.0, 0.0, 0.0};
    if (annulus) {
        set_default("inner", one);
        set_default("outer", zero);
        if (c.contact_segment.empty()) c.contact_segment = "inner";
    } else if (halfdisk) {
        set_default("flat", zero);
        set_default("arc", SegmentProfile{SegmentProfile::Kind::capped_height,
                                          c.flatness_delta0, c.flatness_cap_center,
                                          c.flatness_cap_halfwidth});
    } else {
        set_default("left", one);
        set_default("right", zero);
        if (c.problem == ProblemKind::strip_2d) {
            // Edge ramp whose kink sits on the column where a flat front
            // holds measure alpha exactly, so the extended 1D ramp is an
            // admissible lattice configuration.
            const int rows = std::max(1, c.ny - 2);
            const double per_row = c.alpha / (c.h * c.h * rows);
            const double kink = (std::round(per_row) + 1.0) * c.h;
            SegmentProfile edge{SegmentProfile::Kind::ramp, 1.0, kink, 0.0};
            set_default("bottom", edge);
            set_default("top", edge);
        } else if (c.problem == ProblemKind::square_2d) {
            set_default("bottom", zero);
            set_default("top", zero);
        }
        if (c.contact_segment.empty()) c.contact_segment = "left";
    }
    if (c.c0 == 0.0 && !halfdisk) {
        const auto& contact = c.boundary.at(c.contact_segment);
        if (contact.kind == SegmentProfile::Kind::constant)
            c.c0 = contact.a;
        else if (contact.kind == SegmentProfile::Kind::cosbump)
            c.c0 = contact.a * (1.0 - std::abs(contact.b)) * (1.0 - 1e-12);
        else
            c.c0 = 1e-6;
    }
}

void check_constraints(const RunConfig& c, const std::string& origin) {
    for (double eps : c.epsilon_list)
        if (!(eps > 0.0 && eps <= 1.0))
            throw std::runtime_error(origin +
                                     ": key 'epsilon_list': entries must be in (0, 1]");
    if (!(c.p > 1.0)) throw std::runtime_error(origin + ": key 'p': need p > 1");
    if (c.problem != ProblemKind::halfdisk) {
        const Problem prob = build_problem(c);
        if (!(c.alpha > 0.0) || !(c.alpha < prob.domain->measure()))
            throw std::runtime_error(
                origin + ": key 'alpha': need 0 < alpha < measure of the domain (" +
                format_double(prob.domain->measure()) + ")");
    }
    c.solver.validate();
}

void assign_key(RunConfig& c, const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    if (key == "problem") {
        if (value == "interval_1d")
            c.problem = ProblemKind::interval_1d;
        else if (value == "square_2d")
            c.problem = ProblemKind::square_2d;
        else if (value == "strip_2d")
            c.problem = ProblemKind::strip_2d;
        else if (value == "annulus_2d")
            c.problem = ProblemKind::annulus_2d;
        else if (value == "halfdisk")
            c.problem = ProblemKind::halfdisk;
        else
            fail(origin, line, "key 'problem': unknown problem '" + value + "'");
    } else if (key == "grid.nx") {
        c.nx = parse_int(origin, line, key, value);
    } else if (key == "grid.ny") {
        c.ny = parse_int(origin, line, key, value);
    } else if (key == "grid.h") {
        c.h = parse_double(origin, line, key, value);
        if (!(c.h > 0.0)) fail(origin, line, "key 'grid.h': must be positive");
    } else if (key == "geometry.inner_radius") {
        c.inner_radius = parse_double(origin, line, key, value);
    } else if (key == "geometry.outer_radius") {
        c.outer_radius = parse_double(origin, line, key, value);
    } else if (key == "geometry.radius") {
        c.radius = parse_double(origin, line, key, value);
    } else if (key.rfind("boundary.", 0) == 0) {
        const std::string seg = key.substr(9);
        if (seg == "contact")
            c.contact_segment = value;
        else if (seg == "c0")
            c.c0 = parse_double(origin, line, key, value);
        else
            c.boundary[seg] = parse_profile(origin, line, key, value);
    } else if (key == "p") {
        c.p = parse_double(origin, line, key, value);
    } else if (key == "alpha") {
        c.alpha = parse_double(origin, line, key, value);
    } else if (key == "epsilon_list") {
        c.epsilon_list.clear();
        std::istringstream in(value);
        double d;
        while (in >> d) c.epsilon_list.push_back(d);
        if (c.epsilon_list.empty())
            fail(origin, line, "key 'epsilon_list': expected at least one value");
    } else if (key == "solver.eta") {
        c.solver.eta = parse_double(origin, line, key, value);
    } else if (key == "solver.max_outer") {
        c.solver.max_outer = parse_int(origin, line, key, value);
    } else if (key == "solver.relax_iters") {
        c.solver.relax_iters = parse_int(origin, line, key, value);
    } else if (key == "solver.tol_energy") {
        c.solver.tol_energy = parse_double(origin, line, key, value);
    } else if (key == "solver.toggle_passes") {
        c.solver.toggle_passes = parse_int(origin, line, key, value);
    } else if (key == "solver.seed") {
        c.solver.seed = static_cast<std::uint64_t>(parse_int(origin, line, key, value));
    } else if (key == "output_dir") {
        c.output_dir = value;
    } else if (key == "vol_tol") {
        c.vol_tol = parse_double(origin, line, key, value);
    } else if (key == "sweep.warm_start") {
        if (value == "true" || value == "1")
            c.warm_start = true;
        else if (value == "false" || value == "0")
            c.warm_start = false;
        else
            fail(origin, line, "key 'sweep.warm_start': expected a boolean");
    } else if (key == "flatness.delta0") {
        c.flatness_delta0 = parse_double(origin, line, key, value);
    } else if (key == "flatness.cap_center") {
        c.flatness_cap_center = parse_double(origin, line, key, value);
    } else if (key == "flatness.cap_halfwidth") {
        c.flatness_cap_halfwidth = parse_double(origin, line, key, value);
    } else if (key == "verify.checks") {
        c.verify_checks.clear();
        std::istringstream in(value);
        std::string name;
        while (in >> name) c.verify_checks.push_back(name);
    } else {
        fail(origin, line, "unknown key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(origin, line, "expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(origin, line, "empty key");
        assign_key(config, origin, line, key, value);
    }
    fill_defaults(config);
    check_constraints(config, origin);
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path), path);
}

Problem build_problem(const RunConfig& config) {
    if (config.problem == ProblemKind::halfdisk)
        throw std::runtime_error(
            "halfdisk configs drive the flatness check, not a penalized solve");

    DomainPtr dom;
    switch (config.problem) {
        case ProblemKind::interval_1d:
            dom = build_rectangle(config.nx, 1, config.h);
            break;
        case ProblemKind::square_2d:
        case ProblemKind::strip_2d:
            dom = build_rectangle(config.nx, config.ny, config.h);
            break;
        case ProblemKind::annulus_2d:
            dom = build_annulus(config.inner_radius, config.outer_radius, config.h);
            break;
        case ProblemKind::halfdisk:
            break;
    }

    BoundaryData bdata(dom);
    for (int node : dom->boundary_list) {
        const std::string& seg = dom->segment_names[dom->boundary_tag[node]];
        const auto it = config.boundary.find(seg);
        if (it == config.boundary.end())
            throw std::runtime_error("no boundary profile for segment '" + seg + "'");
        const double x = dom->pos_x(node % dom->nx);
        const double y = dom->pos_y(node / dom->nx);
        const double t = (seg == "bottom" || seg == "top") ? x : y;
        bdata.values[node] = it->second.eval(x, y, t);
    }
    bdata.contact_tag = dom->tag_of(config.contact_segment);
    bdata.c0 = config.c0;
    bdata.validate();
    return {dom, std::move(bdata)};
}

FlatnessConfig flatness_config(const RunConfig& config) {
    FlatnessConfig f;
    f.radius = config.radius;
    f.h = config.h;
    f.p = config.p;
    f.delta0 = config.flatness_delta0;
    f.cap_center_angle = config.flatness_cap_center;
    f.cap_halfwidth = config.flatness_cap_halfwidth;
    f.solver = config.solver;
    return f;
}

}  // namespace pfb
