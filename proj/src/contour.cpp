#include "imc/contour.hpp"

#include <cmath>
#include <limits>

namespace imc {

namespace {
constexpr double kClampTol = 1e-9;
constexpr double kPi = 3.14159265358979323846;

double clamp_cos_arg(double x) {
    if (x > 1.0) {
        if (x > 1.0 + kClampTol) throw EvalOutOfRange("reconstruct_angle: |x/R| > 1 beyond tolerance");
        return 1.0;
    }
    if (x < -1.0) {
        if (x < -1.0 - kClampTol) throw EvalOutOfRange("reconstruct_angle: |x/R| > 1 beyond tolerance");
        return -1.0;
    }
    return x;
}
} // namespace

double reconstruct_angle(int s, double x_over_R) {
    const double x = clamp_cos_arg(x_over_R);
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    return s * kPi + 0.5 * kPi * (1.0 - sign) + sign * std::acos(x);
}

Unwrapper::Unwrapper(double R, Direction dir, int initial_s) : R_(R), dir_(dir) {
    if (!(R > 0)) throw EvalOutOfRange("Unwrapper: R must be positive");
    if (initial_s < 0) throw EvalOutOfRange("Unwrapper: initial interval index must be >= 0");
    state_.s = initial_s;
}

double Unwrapper::emit(double x1) const {
    return reconstruct_angle(state_.s, x1 / R_);
}

double Unwrapper::next(double x1) {
    double theta = emit(x1);
    if (state_.k > 0) {
        const bool increasing = dir_ == Direction::increasing;
        const bool violated = increasing ? (theta <= state_.theta_prev)
                                         : (theta >= state_.theta_prev);
        if (violated) {
            // step 3 of Algorithm 1; the decreasing case mirrors it (Remark 2)
            if (increasing) {
                ++state_.s;
            } else {
                if (state_.s == 0)
                    throw MonotonicityViolation("unwrap: angle left [0, inf) in decreasing mode");
                --state_.s;
            }
            theta = emit(x1);
            const bool still = increasing ? (theta <= state_.theta_prev)
                                          : (theta >= state_.theta_prev);
            if (still)
                throw MonotonicityViolation(
                    "unwrap: monotonicity not restored by one interval step; "
                    "theta advances >= pi per sample or the master is stalled");
        }
        if (std::fabs(theta - state_.theta_prev) >= kPi)
            throw MonotonicityViolation(
                "unwrap: theta advances >= pi per sample; sampling too coarse");
    }
    state_.theta_prev = theta;
    ++state_.k;
    return theta;
}

std::vector<double> unwrap_rotational(const std::vector<double>& x1_samples, double R,
                                      Direction dir, int initial_s) {
    // Batch variant of Algorithm 1. A sample that lands just past m*pi
    // reconstructs, reflected, to a value that is still monotone, so the
    // step-3 test alone cannot see the crossing; the emitted angle would be
    // off by twice the overshoot for that one sample. With the whole record
    // available the crossing is decidable from the neighbours: it happened
    // before sample k iff the previous sample sits closer to the extremum
    // than the next one. The streaming Unwrapper stays strictly causal.
    if (!(R > 0)) throw EvalOutOfRange("unwrap_rotational: R must be positive");
    if (initial_s < 0) throw EvalOutOfRange("unwrap_rotational: initial interval index");
    const bool increasing = dir == Direction::increasing;
    const long n = static_cast<long>(x1_samples.size());
    std::vector<double> out;
    out.reserve(n);
    int s = initial_s;
    for (long k = 0; k < n; ++k) {
        const double x = x1_samples[k] / R;
        if (k == 0) {
            out.push_back(reconstruct_angle(s, x));
            continue;
        }
        const double prev = out.back();
        double theta = reconstruct_angle(s, x);
        const bool bad = increasing ? (theta <= prev) : (theta >= prev);
        if (bad) {
            // step 3 of Algorithm 1 (mirrored for decreasing direction)
            const int s2 = increasing ? s + 1 : s - 1;
            if (s2 < 0)
                throw MonotonicityViolation("unwrap: angle left [0, inf) in decreasing mode");
            theta = reconstruct_angle(s2, x);
            const bool still = increasing ? (theta <= prev) : (theta >= prev);
            if (still)
                throw MonotonicityViolation(
                    "unwrap: monotonicity not restored by one interval step at sample " +
                    std::to_string(k));
            s = s2;
        } else if (k + 1 < n) {
            const int s2 = increasing ? s + 1 : s - 1;
            if (s2 >= 0) {
                const double theta_b = reconstruct_angle(s2, x);
                const bool b_ok = increasing ? (theta_b > prev) : (theta_b < prev);
                // the crossed reading is only entertained when it stays a
                // plausible single step; this rejects the reflect-and-step
                // ghost branch that advances by a near-full interval
                const double step_a = std::fabs(theta - prev);
                const double step_prev = k >= 2 ? std::fabs(prev - out[k - 2]) : step_a;
                const double limit =
                    std::min(kPi, 6.0 * std::max({step_a, step_prev, 1e-300}));
                if (b_ok && theta_b != theta && std::fabs(theta_b - prev) < limit) {
                    // straddle: boundary between theta and theta_b; crossed iff
                    // the previous sample is nearer the extremum than the next
                    const double d_prev = 1.0 - std::fabs(x1_samples[k - 1]) / R;
                    const double d_next = 1.0 - std::fabs(x1_samples[k + 1]) / R;
                    if (d_prev <= d_next) {
                        theta = theta_b;
                        s = s2;
                    }
                }
            }
        }
        if (std::fabs(theta - prev) >= kPi)
            throw MonotonicityViolation(
                "unwrap: theta advances >= pi per sample at sample " + std::to_string(k));
        out.push_back(theta);
    }
    return out;
}

ContourPoint eval_contour(const ContourSpec& spec, double v, std::size_t slave_index) {
    if (slave_index >= spec.slave_fns.size())
        throw EvalOutOfRange("eval_contour: bad slave index");
    if (spec.domain) {
        if (v < spec.domain->first || v > spec.domain->second)
            throw EvalOutOfRange("eval_contour: master position outside declared range");
    }
    const double r = spec.slave_fns[slave_index](v);
    const double rp = spec.slave_fn_derivs[slave_index](v);
    if (!std::isfinite(r))
        throw EvalOutOfRange("eval_contour: reference not finite");
    if (!std::isfinite(rp))
        throw NonFiniteDerivative("eval_contour: derivative not finite");
    return {r, rp};
}

double estimate_amplitude(const ScalarFn& master_gen, double horizon, double Ts) {
    double m = 0;
    const long n = static_cast<long>(std::floor(horizon / Ts));
    for (long k = 0; k <= n; ++k) m = std::max(m, std::fabs(master_gen(k * Ts)));
    return m + 1e-12;
}

AssumptionReport check_assumptions(const ContourSpec& spec, double horizon, double Ts) {
    AssumptionReport rep;
    if (!(horizon > 0) || !(Ts > 0)) {
        rep.message = "bad horizon/Ts";
        return rep;
    }
    const long n = static_cast<long>(std::floor(horizon / Ts));
    rep.samples = n + 1;

    std::vector<double> x1(rep.samples);
    for (long k = 0; k <= n; ++k) x1[k] = spec.master_gen(k * Ts);

    std::vector<double> v;  // monotone position-domain variable
    if (spec.kind == ContourKind::monotonic) {
        v = x1;
    } else {
        rep.estimated_R = spec.amplitude_R > 0 ? spec.amplitude_R
                                               : estimate_amplitude(spec.master_gen, horizon, Ts);
        for (double x : x1) {
            if (std::fabs(x) > rep.estimated_R * (1.0 + kClampTol)) {
                rep.amplitude_ok = false;
                break;
            }
        }
        if (!rep.amplitude_ok) {
            rep.message = "|x1| exceeds amplitude R";
            return rep;
        }
        try {
            v = unwrap_rotational(x1, rep.estimated_R, spec.direction);
        } catch (const MonotonicityViolation& e) {
            rep.monotone_ok = false;
            rep.message = e.what();
            return rep;
        }
    }

    rep.monotone_ok = true;
    rep.min_step = std::numeric_limits<double>::infinity();
    rep.max_step = 0;
    const double sgn = spec.direction == Direction::increasing ? 1.0 : -1.0;
    for (long k = 1; k <= n; ++k) {
        const double dv = sgn * (v[k] - v[k - 1]);
        if (dv <= 0) rep.monotone_ok = false;
        rep.min_step = std::min(rep.min_step, std::fabs(dv));
        rep.max_step = std::max(rep.max_step, std::fabs(dv));
    }
    if (spec.kind == ContourKind::rotational && rep.max_step >= kPi) rep.monotone_ok = false;

    rep.derivatives_finite = true;
    for (std::size_t i = 0; i < spec.slave_fns.size() && rep.derivatives_finite; ++i) {
        for (long k = 0; k <= n; ++k) {
            const double r = spec.slave_fns[i](v[k]);
            const double rp = spec.slave_fn_derivs[i](v[k]);
            if (!std::isfinite(r) || !std::isfinite(rp)) {
                rep.derivatives_finite = false;
                rep.message = "non-finite reference or derivative in sampled range";
                break;
            }
        }
    }

    rep.pass = rep.monotone_ok && rep.derivatives_finite && rep.amplitude_ok;
    if (rep.pass) rep.message = "ok";
    else if (rep.message.empty()) rep.message = "master variable not strictly monotone";
    return rep;
}

} // namespace imc
