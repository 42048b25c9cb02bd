#include "imc/scenario.hpp"

#include <cmath>
#include <cstdio>

#include "imc/errors.hpp"
#include "imc/linalg.hpp"

namespace imc {

namespace {
constexpr double kPi = 3.14159265358979323846;

double signed_pow23(double c) {
    return c >= 0 ? std::pow(c, 2.0 / 3.0) : -std::pow(-c, 2.0 / 3.0);
}
} // namespace

std::string to_string(ControllerType t) {
    switch (t) {
        case ControllerType::tvimcc: return "tvimcc";
        case ControllerType::pid: return "pid";
        case ControllerType::ccc: return "ccc";
    }
    return "?";
}

ControllerType controller_from_string(const std::string& s) {
    if (s == "tvimcc") return ControllerType::tvimcc;
    if (s == "pid") return ControllerType::pid;
    if (s == "ccc") return ControllerType::ccc;
    throw ConfigError("unknown controller '" + s + "' (expected tvimcc|pid|ccc)");
}

double SlaveFnSpec::eval(double v) const {
    switch (type) {
        case Type::sine: return a * std::sin(b * v + c);
        case Type::cosine: return a * std::cos(b * v + c);
        case Type::heart_power: return a * (std::sin(b * v + c) + signed_pow23(std::cos(b * v + c)));
        case Type::zero: return 0;
        case Type::linear: return a + b * v;
    }
    return 0;
}

double SlaveFnSpec::deriv(double v) const {
    switch (type) {
        case Type::sine: return a * b * std::cos(b * v + c);
        case Type::cosine: return -a * b * std::sin(b * v + c);
        case Type::heart_power: {
            const double cc = std::cos(b * v + c);
            const double s = std::sin(b * v + c);
            // d/dv sgn(cos)|cos|^{2/3} = -(2/3) b sin |cos|^{-1/3}; singular at the cusp
            return a * b * (cc - (2.0 / 3.0) * s / std::cbrt(std::fabs(cc)));
        }
        case Type::zero: return 0;
        case Type::linear: return b;
    }
    return 0;
}

double SlaveFnSpec::companion(double v) const {
    switch (type) {
        case Type::sine: return a * std::cos(b * v + c);
        case Type::cosine: return a * std::sin(b * v + c);
        case Type::heart_power: return a * std::cos(b * v + c);
        case Type::zero: return 1.0;
        case Type::linear: return v;  // generic ramp companion; offset raised on demand
    }
    return 0;
}

double MasterSpec::position(double t) const {
    if (type == Type::ramp_sine) return c0 + c1 * t + c2 * std::sin(c3 * t);
    return R * std::cos(w * t + phi0);
}

double MasterSpec::nominal(double t) const {
    if (type == Type::ramp_sine) return c0 + c1 * t;
    return position(t);
}

double MasterSpec::angle(double t) const { return w * t + phi0; }

ContourSpec Scenario::contour() const {
    ContourSpec spec;
    spec.kind = kind;
    spec.master_gen = [m = master](double t) { return m.position(t); };
    for (const auto& fn : slave_fns) {
        spec.slave_fns.push_back([fn](double v) { return fn.eval(v); });
        spec.slave_fn_derivs.push_back([fn](double v) { return fn.deriv(v); });
    }
    if (kind == ContourKind::rotational) spec.amplitude_R = master.R;
    spec.direction = Direction::increasing;
    return spec;
}

std::string Scenario::canonical_text() const {
    char buf[512];
    std::string s = "scenario:" + name;
    auto add = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, ";%s=%.17g", key, v);
        s += buf;
    };
    s += ";kind=" + std::string(kind == ContourKind::monotonic ? "monotonic" : "rotational");
    s += ";controller=" + to_string(slave_controller);
    s += ";mode=" + std::string(master_mode == MasterMode::prescribed ? "prescribed" : "tracked");
    s += ";comp=" + std::string(composition == CompositionType::master_slave_xy ? "xy" : "4axis");
    add("m.type", master.type == MasterSpec::Type::ramp_sine ? 0 : 1);
    add("m.c0", master.c0); add("m.c1", master.c1); add("m.c2", master.c2); add("m.c3", master.c3);
    add("m.R", master.R); add("m.w", master.w); add("m.phi0", master.phi0);
    for (const auto& fn : slave_fns) {
        add("s.type", static_cast<double>(fn.type));
        add("s.a", fn.a); add("s.b", fn.b); add("s.c", fn.c);
    }
    auto add_plant = [&](const char* tag, const PlantDT& p) {
        for (int r = 0; r < p.n(); ++r)
            for (int c = 0; c < p.n(); ++c) add(tag, p.G2(r, c));
        for (int r = 0; r < p.n(); ++r) add(tag, p.H2(r));
        for (int c = 0; c < p.n(); ++c) add(tag, p.C2(c));
    };
    add_plant("mp", master_plant);
    add_plant("sp", slave_plant);
    add("Ts", Ts); add("horizon", horizon);
    add("seed", static_cast<double>(seed));
    add("kp", gains.pid.Kp); add("ki", gains.pid.Ki); add("kd", gains.pid.Kd);
    add("kx", gains.ccc.Kx); add("ky", gains.ccc.Ky);
    add("gridN", stab.grid_N); add("gridM", stab.grid_margin);
    add("obsr", stab.observer_radius); add("decay", stab.decay);
    add("tau", stab.margin_tau); add("box", stab.box); add("proot", stab.placed_root);
    add("coscut", metrics_coscut); add("settle", settle_threshold);
    return s;
}

std::uint64_t Scenario::hash() const { return fnv1a(canonical_text()); }

double heart_zero_phase() {
    // f(theta) = sin(theta) + sgn(cos)|cos|^{2/3} crosses zero in (pi/2, pi)
    double lo = kPi / 2 + 1e-6, hi = kPi - 1e-6;
    auto f = [](double th) { return std::sin(th) + signed_pow23(std::cos(th)); };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::string> builtin_scenario_names() {
    return {"sinusoid", "circle", "heart", "four_axis"};
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& n : builtin_scenario_names())
        if (n == name) return true;
    return false;
}

Scenario builtin_scenario(const std::string& name) {
    Scenario sc;
    auto [master, slave] = paper_plants();
    sc.master_plant = master;
    sc.slave_plant = slave;
    sc.Ts = 1e-4;
    sc.name = name;
    if (name == "sinusoid") {
        sc.kind = ContourKind::monotonic;
        sc.master.type = MasterSpec::Type::ramp_sine;
        sc.master.c0 = 0; sc.master.c1 = 1; sc.master.c2 = 0.1; sc.master.c3 = 5;
        sc.slave_fns = {{SlaveFnSpec::Type::sine, 1, 1, 0}};
        sc.horizon = 20;
    } else if (name == "circle") {
        sc.kind = ContourKind::rotational;
        sc.master.type = MasterSpec::Type::cosine;
        sc.master.R = 1; sc.master.w = kPi / 10; sc.master.phi0 = 0;
        sc.slave_fns = {{SlaveFnSpec::Type::sine, 1, 1, 0}};
        sc.horizon = 20;
    } else if (name == "heart") {
        sc.kind = ContourKind::rotational;
        sc.master.type = MasterSpec::Type::cosine;
        sc.master.R = 1; sc.master.w = kPi / 25; sc.master.phi0 = heart_zero_phase();
        sc.slave_fns = {{SlaveFnSpec::Type::heart_power, 1, 1, 0}};
        sc.horizon = 50;
        sc.metrics_coscut = 1e-3;
    } else if (name == "four_axis") {
        sc.kind = ContourKind::rotational;
        sc.master.type = MasterSpec::Type::cosine;
        sc.master.R = 1; sc.master.w = 1; sc.master.phi0 = 0;
        sc.slave_fns = {{SlaveFnSpec::Type::sine, 1, 1, 0},
                        {SlaveFnSpec::Type::cosine, 0.1, 10, 0},
                        {SlaveFnSpec::Type::sine, 0.1, 10, 0}};
        sc.horizon = 15;
        sc.composition = CompositionType::four_axis_xy;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return sc;
}

} // namespace imc
