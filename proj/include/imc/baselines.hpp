#pragma once

namespace imc {

struct PidGains {
    double Kp = 2.6;
    double Ki = 11.4;
    double Kd = 0.1;
};

/// Positional PID with trapezoidal integral and backward-difference derivative.
struct PidState {
    double integral = 0;
    double e_prev = 0;
    bool primed = false;  ///< false until the first step (derivative/integral hold zero history)

    void reset() { *this = PidState{}; }
};

double pid_step(PidState& state, double e, double Ts, const PidGains& g);

struct CccGains {
    double Kx = 10.0;
    double Ky = 30.0;
};

struct CccCorrection {
    double epsilon_hat = 0;  ///< linearized contour-error estimate
    double du_x = 0;
    double du_y = 0;
};

/// Classical cross-coupled correction: eps = -e_x sin(phi) + e_y cos(phi),
/// du_x = -Kx eps sin(phi), du_y = +Ky eps cos(phi). Errors are expressed as
/// reference minus actual (tracking-error convention, same as the PID input);
/// phi is the reference tangent angle.
CccCorrection ccc_step(double e_x, double e_y, double tangent_angle, const CccGains& g);

} // namespace imc
