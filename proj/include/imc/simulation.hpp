#pragma once

#include <string>
#include <vector>

#include "imc/scenario.hpp"
#include "imc/trace.hpp"

namespace imc {

struct SynthesisReport {
    double sylvester_residual_max = 0;
    double sylvester_residual_mean = 0;
    double lmi_solver_margin = 0;
    double eq46_min_margin = 0;
    bool placed_root_used = false;
    double master_spectral_radius = 0;
    double slave_spectral_radius = 0;
    bool master_plant_stable = false;
    bool slave_plant_stable = false;
    std::uint64_t scenario_hash = 0;

    std::string text() const;
};

struct RunResult {
    SimulationTrace trace;
    ContourMetrics metrics;
    SynthesisReport synthesis;
    std::vector<double> slave_e2_rms;  ///< per-slave axial error RMS over the run (mm)
};

/// Deterministic fixed-step closed-loop run of one scenario. Throws
/// AssumptionFailure when the tv-imcc contour assumptions fail and
/// SynthesisFailure when gain synthesis fails.
RunResult run_closed_loop(const Scenario& scenario);

} // namespace imc
