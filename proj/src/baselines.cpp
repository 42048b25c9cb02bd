#include "imc/baselines.hpp"

#include <cmath>

namespace imc {

double pid_step(PidState& s, double e, double Ts, const PidGains& g) {
    const double e_prev = s.primed ? s.e_prev : 0.0;
    s.integral += Ts * 0.5 * (e + e_prev);
    const double deriv = (e - e_prev) / Ts;
    s.e_prev = e;
    s.primed = true;
    return g.Kp * e + g.Ki * s.integral + g.Kd * deriv;
}

CccCorrection ccc_step(double e_x, double e_y, double phi, const CccGains& g) {
    CccCorrection c;
    const double sp = std::sin(phi), cp = std::cos(phi);
    c.epsilon_hat = -e_x * sp + e_y * cp;
    c.du_x = -g.Kx * c.epsilon_hat * sp;
    c.du_y = g.Ky * c.epsilon_hat * cp;
    return c;
}

} // namespace imc
