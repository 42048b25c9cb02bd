#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imc/baselines.hpp"
#include "imc/contour.hpp"
#include "imc/plant.hpp"

namespace imc {

enum class ControllerType { tvimcc, pid, ccc };
enum class MasterMode { prescribed, tracked };
enum class CompositionType { master_slave_xy, four_axis_xy };

std::string to_string(ControllerType t);
ControllerType controller_from_string(const std::string& s);

/// Closed-form slave reference from a small catalog. Each entry knows its
/// analytic derivative and a companion (quadrature) signal used as the second
/// exosystem state.
struct SlaveFnSpec {
    enum class Type { sine, cosine, heart_power, zero, linear };
    Type type = Type::sine;
    double a = 1, b = 1, c = 0;

    double eval(double v) const;
    double deriv(double v) const;
    double companion(double v) const;
};

/// Analytic master position trajectory.
struct MasterSpec {
    enum class Type { ramp_sine, cosine };
    Type type = Type::ramp_sine;
    // ramp_sine: x1 = c0 + c1 t + c2 sin(c3 t); the c2 term is the injected d_a
    double c0 = 0, c1 = 1, c2 = 0, c3 = 1;
    // cosine: x1 = R cos(w t + phi0)
    double R = 1, w = 1, phi0 = 0;

    double position(double t) const;
    double nominal(double t) const;   ///< position with the injected d_a removed
    double angle(double t) const;     ///< cosine type: w t + phi0
};

struct StabilizerConfig {
    int grid_N = 9;
    double grid_margin = 0.05;     ///< grid range stretch beyond the dry-run span
    double observer_radius = 0.2;
    double decay = 0.9995;
    double margin_tau = 1e-8;
    double box = 1e9;
    double placed_root = 0.0;      ///< complementary root used when Eq-35 is not Schur
};

struct Gains {
    PidGains pid;
    CccGains ccc;
};

struct Scenario {
    std::string name = "custom";
    ContourKind kind = ContourKind::monotonic;
    MasterSpec master;
    std::vector<SlaveFnSpec> slave_fns;
    PlantDT master_plant;
    PlantDT slave_plant;
    ControllerType slave_controller = ControllerType::tvimcc;
    MasterMode master_mode = MasterMode::prescribed;
    CompositionType composition = CompositionType::master_slave_xy;
    double Ts = 1e-4;
    double horizon = 20.0;
    std::uint64_t seed = 0;
    Gains gains;
    StabilizerConfig stab;
    double metrics_coscut = 0;        ///< exclude |cos(theta)| < this from metrics
    double settle_threshold = 1e-6;   ///< mm

    int n_slaves() const { return static_cast<int>(slave_fns.size()); }
    ContourSpec contour() const;
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);
Scenario builtin_scenario(const std::string& name);

/// Phase at which the heart slave reference crosses zero in (pi/2, pi);
/// the built-in heart scenario starts there so the zero-initial-state
/// protocol begins on the contour.
double heart_zero_phase();

} // namespace imc
