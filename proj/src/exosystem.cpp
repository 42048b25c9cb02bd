#include "imc/exosystem.hpp"

#include <cmath>

namespace imc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateTol = 1e-9;
} // namespace

const Eigen::RowVector2d ExosystemCT::Q = (Eigen::RowVector2d() << 1, 0).finished();

double ExosystemCT::l(double x1) const {
    return std::hypot(shifted(x1), f(x1));
}

double ExosystemCT::l_prime(double x1) const {
    const double s = shifted(x1);
    return (s + f(x1) * f_prime(x1)) / l(x1);
}

double ExosystemCT::eta(double x1) const {
    return std::atan2(shifted(x1), f(x1));
}

double ExosystemCT::eta_prime(double x1) const {
    const double s = shifted(x1);
    const double fv = f(x1);
    const double ll = s * s + fv * fv;
    return (fv - s * f_prime(x1)) / ll;
}

Eigen::Matrix2d ExosystemCT::S_canonical(double x1) const {
    const double r = l_prime(x1) / l(x1);
    Eigen::Matrix2d S;
    S << r, -1, 1, r;
    return S;
}

Eigen::Matrix2d ExosystemCT::S_generator(double x1) const {
    const double r = l_prime(x1) / l(x1);
    const double ep = eta_prime(x1);
    Eigen::Matrix2d S;
    S << r, -ep, ep, r;
    return S;
}

Eigen::Vector2d ExosystemCT::state(double x1) const {
    return Eigen::Vector2d(f(x1), shifted(x1));
}

ExosystemCT build_exosystem_ct(ScalarFn f, ScalarFn f_prime, double x1_offset,
                               double range_lo, double range_hi, int scan_points) {
    ExosystemCT exo{std::move(f), std::move(f_prime), x1_offset};
    double lmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan_points; ++i) {
        const double x = range_lo + (range_hi - range_lo) * i / scan_points;
        lmin = std::min(lmin, exo.l(x));
    }
    if (!(lmin > kDegenerateTol))
        throw DegenerateL("build_exosystem_ct: l(x1) vanishes on the declared range; "
                          "raise x1_offset");
    return exo;
}

Eigen::Matrix2d exosystem_to_time(const ExosystemCT& exo, double x1dot, double x1) {
    return x1dot * exo.S_generator(x1);
}

Eigen::Matrix2d discretize_exosystem(const Eigen::Matrix2d& Sbar, double Ts,
                                     DiscretizationMethod method) {
    const double a = Sbar(0, 0);
    const double b = Sbar(1, 0);
    const double scale = std::max(1.0, Sbar.cwiseAbs().maxCoeff());
    if (std::fabs(Sbar(1, 1) - a) > 1e-12 * scale ||
        std::fabs(Sbar(0, 1) + b) > 1e-12 * scale)
        throw StructureViolation("discretize_exosystem: S-bar is not of the aI + bJ form");
    if (method == DiscretizationMethod::euler)
        return Eigen::Matrix2d::Identity() + Ts * Sbar;
    const double ea = std::exp(a * Ts);
    const double cb = std::cos(b * Ts), sb = std::sin(b * Ts);
    Eigen::Matrix2d Sd;
    Sd << ea * cb, -ea * sb, ea * sb, ea * cb;
    return Sd;
}

ExoRates rates_from_states(const Eigen::Vector2d& w0, const Eigen::Vector2d& w1, double Ts) {
    const double l0 = w0.norm(), l1 = w1.norm();
    if (!(l0 > kDegenerateTol) || !(l1 > kDegenerateTol))
        throw DegenerateL("rates_from_states: generator state at the origin");
    double de = std::atan2(w1(1), w1(0)) - std::atan2(w0(1), w0(0));
    if (de > kPi) de -= 2 * kPi;
    if (de < -kPi) de += 2 * kPi;
    return {std::log(l1 / l0) / Ts, de / Ts};
}

Eigen::Matrix2d transition_from_rates(const ExoRates& r, double Ts) {
    const double ea = std::exp(r.a * Ts);
    const double cb = std::cos(r.b * Ts), sb = std::sin(r.b * Ts);
    Eigen::Matrix2d Sd;
    Sd << ea * cb, -ea * sb, ea * sb, ea * cb;
    return Sd;
}

Eigen::Vector2d frozen_alpha(const ExoRates& r, double Ts) {
    const double ea = std::exp(r.a * Ts);
    return Eigen::Vector2d(-2.0 * ea * std::cos(r.b * Ts), ea * ea);
}

Eigen::Vector2d ltv_alpha(const Eigen::Matrix2d& S0, const Eigen::Matrix2d& S1,
                          double singular_tol) {
    // rows of the 2x2 system: [Q*S0; Q], Q = [1 0]
    Eigen::Matrix2d Ob;
    Ob.row(0) = S0.row(0);
    Ob(1, 0) = 1;
    Ob(1, 1) = 0;
    const Eigen::RowVector2d rhs = -(S1 * S0).row(0);
    const double det = Ob(0, 0) * Ob(1, 1) - Ob(0, 1) * Ob(1, 0);
    const double scale = std::max(1.0, Ob.cwiseAbs().maxCoeff());
    if (std::fabs(det) <= singular_tol * scale * scale) {
        // unobservable output direction; the frozen polynomial still annihilates
        return Eigen::Vector2d(-S0.trace(), S0.determinant());
    }
    return Ob.transpose().fullPivLu().solve(rhs.transpose());
}

} // namespace imc
