#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imc/errors.hpp"

namespace imc {

enum class ContourKind { monotonic, rotational };
enum class Direction { increasing, decreasing };

using ScalarFn = std::function<double(double)>;

/// A contour as a master reference generator plus slave functions of the
/// master position (monotonic kind) or of the unwrapped angle (rotational kind).
struct ContourSpec {
    ContourKind kind = ContourKind::monotonic;
    ScalarFn master_gen;                    ///< t -> x1(t), position units
    std::vector<ScalarFn> slave_fns;        ///< v -> r_i(v)
    std::vector<ScalarFn> slave_fn_derivs;  ///< v -> dr_i/dv (analytic)
    double amplitude_R = 0.0;               ///< rotational: sup |x1|; 0 = estimate
    Direction direction = Direction::increasing;
    std::optional<std::pair<double, double>> domain;  ///< valid v range, if bounded
};

/// Lemma-1 reconstruction: s*pi + (pi/2)(1-(-1)^s) + (-1)^s * acos(x).
/// x is clamped into [-1,1] with tolerance 1e-9; beyond that throws EvalOutOfRange.
double reconstruct_angle(int s, double x_over_R);

/// State of the rotational-to-monotone conversion (Algorithm 1).
struct UnwrapState {
    int s = 0;             ///< interval index, theta in [s*pi, (s+1)*pi]
    double theta_prev = 0; ///< last emitted angle
    long k = 0;            ///< sample index
};

/// Streaming form of Algorithm 1. One s adjustment is retried per sample;
/// if monotonicity still fails the sampling is too coarse and we raise.
class Unwrapper {
  public:
    Unwrapper(double R, Direction dir = Direction::increasing, int initial_s = 0);

    double next(double x1);
    const UnwrapState& state() const { return state_; }
    double R() const { return R_; }

  private:
    double emit(double x1) const;

    double R_;
    Direction dir_;
    UnwrapState state_;
};

/// Batch conversion of sampled x1 to a strictly monotone angle sequence.
std::vector<double> unwrap_rotational(const std::vector<double>& x1_samples, double R,
                                      Direction dir = Direction::increasing,
                                      int initial_s = 0);

struct ContourPoint {
    double r;        ///< f(v)
    double r_prime;  ///< df/dv
};

/// Evaluate slave reference and its position-domain derivative.
ContourPoint eval_contour(const ContourSpec& spec, double v, std::size_t slave_index = 0);

/// Pass/fail report for the framework assumptions over a sampled horizon.
struct AssumptionReport {
    bool pass = false;
    bool monotone_ok = false;
    bool derivatives_finite = false;
    bool amplitude_ok = true;   ///< rotational: |x1| <= R (after clamp tolerance)
    double min_step = 0;        ///< min |dv| between consecutive samples
    double max_step = 0;        ///< max |dv| (must stay below pi for rotational)
    long samples = 0;
    double estimated_R = 0;     ///< rotational only
    std::string message;
};

/// Samples the master generator over [0, horizon] and validates Assumptions
/// 2.1/2.2 at the sample level. Never throws; the report carries the verdict.
AssumptionReport check_assumptions(const ContourSpec& spec, double horizon, double Ts);

/// sup |x1| over a dry run plus a small slack; used when amplitude_R is unset.
double estimate_amplitude(const ScalarFn& master_gen, double horizon, double Ts);

} // namespace imc
