#include "imc/contour_error.hpp"

#include <algorithm>
#include <cmath>

namespace imc {

CurvePolyline::CurvePolyline(CurveFn curve, double v0, double v1, long segments, CurveFn deriv)
    : curve_(std::move(curve)), deriv_(std::move(deriv)), v0_(v0), v1_(v1),
      dv_((v1 - v0) / segments) {
    pts_.reserve(segments + 1);
    for (long i = 0; i <= segments; ++i)
        pts_.push_back(curve_(v0_ + dv_ * i));
}

double CurvePolyline::segment_distance(const Eigen::Vector2d& p, long i) const {
    const Eigen::Vector2d& a = pts_[i];
    const Eigen::Vector2d& b = pts_[i + 1];
    const Eigen::Vector2d ab = b - a;
    const double L2 = ab.squaredNorm();
    double t = L2 > 0 ? (p - a).dot(ab) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double CurvePolyline::refine(const Eigen::Vector2d& p, double v_guess, double best) const {
    if (!deriv_) return best;
    double v = v_guess;
    for (int it = 0; it < 3; ++it) {
        const Eigen::Vector2d c = curve_(v);
        const Eigen::Vector2d d = deriv_(v);
        if (!d.allFinite()) return best;
        const double dd = d.squaredNorm();
        if (dd < 1e-300) return best;
        // minimize |c(v) - p|^2: v <- v - (c-p).d / (d.d) (Gauss-Newton)
        const double stepv = (c - p).dot(d) / dd;
        v -= stepv;
        if (!std::isfinite(v)) return best;
        v = std::clamp(v, v0_, v1_);
    }
    const double refined = (curve_(v) - p).norm();
    return std::min(best, refined);
}

double CurvePolyline::distance(const Eigen::Vector2d& p) const {
    double best = std::numeric_limits<double>::infinity();
    long besti = 0;
    for (long i = 0; i + 1 < static_cast<long>(pts_.size()); ++i) {
        const double d = segment_distance(p, i);
        if (d < best) {
            best = d;
            besti = i;
        }
    }
    return refine(p, v0_ + dv_ * (besti + 0.5), best);
}

double CurvePolyline::distance_bruteforce(const Eigen::Vector2d& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i + 1 < static_cast<long>(pts_.size()); ++i)
        best = std::min(best, segment_distance(p, i));
    return best;
}

double CurvePolyline::distance_near(const Eigen::Vector2d& p, double v_seed, long* hint) const {
    const long nseg = static_cast<long>(pts_.size()) - 1;
    long iseed = std::clamp(static_cast<long>((v_seed - v0_) / dv_), 0L, nseg - 1);
    if (hint && *hint >= 0 && *hint < nseg) iseed = *hint;
    long half = 64;
    double best = std::numeric_limits<double>::infinity();
    long besti = iseed;
    for (;;) {
        const long loi = std::max(0L, iseed - half);
        const long hii = std::min(nseg - 1, iseed + half);
        best = std::numeric_limits<double>::infinity();
        for (long i = loi; i <= hii; ++i) {
            const double d = segment_distance(p, i);
            if (d < best) {
                best = d;
                besti = i;
            }
        }
        const bool at_lo = besti <= loi + 1 && loi > 0;
        const bool at_hi = besti >= hii - 1 && hii < nseg - 1;
        if (!at_lo && !at_hi) break;
        if (half >= nseg) break;
        half *= 4;
    }
    if (hint) *hint = besti;
    return refine(p, v0_ + dv_ * (besti + 0.5), best);
}

} // namespace imc
