#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace imc {

using CurveFn = std::function<Eigen::Vector2d(double)>;

/// Dense polyline sampling of a parametric planar curve, with nearest-point
/// queries. Queries scan segments and then refine on the smooth curve with a
/// few Newton steps when a derivative is available.
class CurvePolyline {
  public:
    CurvePolyline(CurveFn curve, double v0, double v1, long segments,
                  CurveFn derivative = nullptr);

    /// Global nearest distance (scans every segment).
    double distance(const Eigen::Vector2d& p) const;

    /// Local nearest distance around a parameter seed. When `hint` is given it
    /// warm-starts the search with the previous query's segment and receives
    /// the new one; the scan window doubles until the minimum is interior.
    double distance_near(const Eigen::Vector2d& p, double v_seed, long* hint = nullptr) const;

    /// Segment-only distance (no Newton refinement); test oracle helper.
    double distance_bruteforce(const Eigen::Vector2d& p) const;

    double v0() const { return v0_; }
    double v1() const { return v1_; }
    double step() const { return dv_; }

  private:
    double refine(const Eigen::Vector2d& p, double v_guess, double best) const;
    double segment_distance(const Eigen::Vector2d& p, long i) const;

    CurveFn curve_;
    CurveFn deriv_;
    double v0_, v1_, dv_;
    std::vector<Eigen::Vector2d> pts_;
};

} // namespace imc
