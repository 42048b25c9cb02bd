#pragma once

#include <Eigen/Dense>
#include <functional>

#include "imc/contour.hpp"
#include "imc/errors.hpp"

namespace imc {

/// Continuous position-domain generating dynamics of a master-slave pair.
/// State w = [f(x1); x1 + offset], l(x1) = sqrt((x1+offset)^2 + f^2),
/// l' = ((x1+offset) + f f')/l. Two matrix views are exposed:
///  - S_canonical: the [[l'/l, -1],[1, l'/l]] display (Eq. 22 shape),
///  - S_generator: the exact generator [[l'/l, -eta'],[eta', l'/l]] with
///    eta = atan2(x1+offset, f); integrating w' = S_generator(x1) w
///    reproduces [f(x1); x1+offset] identically.
struct ExosystemCT {
    ScalarFn f;
    ScalarFn f_prime;
    double x1_offset = 0;

    double shifted(double x1) const { return x1 + x1_offset; }
    double l(double x1) const;
    double l_prime(double x1) const;
    double eta(double x1) const;
    double eta_prime(double x1) const;

    Eigen::Matrix2d S_canonical(double x1) const;
    Eigen::Matrix2d S_generator(double x1) const;
    Eigen::Vector2d state(double x1) const;  ///< w(x1) = [f; x1+offset]

    static const Eigen::RowVector2d Q;       ///< output row [1 0]
};

/// Builds the exosystem and scans [range_lo, range_hi] for l degeneracy.
ExosystemCT build_exosystem_ct(ScalarFn f, ScalarFn f_prime, double x1_offset,
                               double range_lo, double range_hi,
                               int scan_points = 2048);

/// Chain-rule transform to the time domain: x1dot * S_generator(x1).
Eigen::Matrix2d exosystem_to_time(const ExosystemCT& exo, double x1dot, double x1);

enum class DiscretizationMethod { exact, euler };

/// Discretizes an S-bar of the form a*I + b*J (J = [[0,-1],[1,0]]).
/// Exact: e^{a Ts} (cos(b Ts) I + sin(b Ts) J). Throws StructureViolation
/// if S-bar deviates from the aI+bJ structure beyond 1e-12 (relative).
Eigen::Matrix2d discretize_exosystem(const Eigen::Matrix2d& Sbar, double Ts,
                                     DiscretizationMethod method = DiscretizationMethod::exact);

/// Per-sample discrete transition data: w(k+1) = e^{a Ts} R(b Ts) w(k), exact
/// for the two reference states it was built from.
struct ExoRates {
    double a = 0;  ///< log-radial rate, -> l_dot/l as Ts -> 0
    double b = 0;  ///< rotation rate,   -> eta_dot  as Ts -> 0
};

/// Exact rates between consecutive generator states (polar two-point map).
ExoRates rates_from_states(const Eigen::Vector2d& w0, const Eigen::Vector2d& w1, double Ts);

Eigen::Matrix2d transition_from_rates(const ExoRates& r, double Ts);

/// Coefficients [a1, a0] of z^2 + a1 z + a0, the frozen characteristic
/// polynomial of the discrete transition for the given rates.
Eigen::Vector2d frozen_alpha(const ExoRates& r, double Ts);

/// Time-varying observer-canonical coefficients alpha(k): the exact two-step
/// annihilator of the reference sequence, solving
///   [a1 a0] * [Q*S0; Q] = -Q*S1*S0
/// where S0 = transition(k), S1 = transition(k+1). Falls back to the frozen
/// characteristic polynomial of S0 when the stacked matrix is singular.
Eigen::Vector2d ltv_alpha(const Eigen::Matrix2d& S0, const Eigen::Matrix2d& S1,
                          double singular_tol = 1e-13);

} // namespace imc
