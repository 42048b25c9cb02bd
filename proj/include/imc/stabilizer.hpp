#pragma once

#include <functional>
#include <vector>

#include "imc/linalg.hpp"
#include "imc/sdp.hpp"

namespace imc {

/// Stabilization target for the augmented plant + internal-model loop:
/// A(v) is the observer companion of the exosystem coefficients alpha(v)
/// (padded with zeros when n > rho), B is the plant input column in the
/// observer-canonical coordinates the whole construction lives in.
struct AugmentedSystem {
    int n = 0;
    std::function<Vec(double)> alpha_of;  ///< scheduling variable -> alpha (rho <= n)
    Vec B;

    Mat A(const Vec& alpha) const;

    // Eq. 43 split: x_o1 scalar measured state, x_b the remaining n-1.
    double A11(const Vec& alpha) const { return -alpha(0); }
    RowVec A12() const;               ///< constant [1 0 .. 0], length n-1
    Vec A21(const Vec& alpha) const;  ///< [-alpha(1..); 0..], length n-1
    Mat A22() const;                  ///< constant shift block
    double B1() const { return B(0); }
    Vec B2() const { return B.tail(n - 1); }
};

AugmentedSystem build_augmented(std::function<Vec(double)> alpha_of, const Vec& B_canon, int n);

/// Ordered vertex grid over the scheduling variable with frozen vertex matrices.
struct PolytopeGrid {
    Vec vertices;             ///< strictly increasing scheduling positions
    std::vector<Mat> A_i;
    std::vector<Vec> alpha_i;
    int N() const { return static_cast<int>(vertices.size()); }
    double lo() const { return vertices(0); }
    double hi() const { return vertices(vertices.size() - 1); }
};

PolytopeGrid make_grid(const AugmentedSystem& sys, const Vec& vertex_positions);

/// Piecewise-linear interpolation weights over the bracketing vertex pair:
/// sigma_i >= 0 and sum sigma_i = 1. Throws OutOfRange outside the grid.
Vec sigma_weights(double x1, const PolytopeGrid& grid);

struct SynthesisOptions {
    double observer_radius = 0.2;  ///< |poles| of A22 - H*A12
    double decay = 0.9995;         ///< per-sample contraction target for the LMI
    double margin_tau = 1e-8;
    double box = 1e9;
};

struct StabilizerSchedule {
    PolytopeGrid grid;
    std::vector<Mat> Q_i;
    std::vector<Mat> G_i;
    std::vector<RowVec> R_i;
    std::vector<RowVec> K_i;       ///< R_i * G_i^{-1}
    Vec H;                         ///< constant reduced-order observer gain, length n-1
    double solver_margin = 0;      ///< maximized margin of the synthesis LMIs
    MarginReport eq46_margins;     ///< independent eigencheck of the undecayed blocks
    double observer_radius = 0;

    RowVec K_of(double x1) const;  ///< sum sigma_i R_i G_i^{-1}
};

/// Builds the Lemma-4 LMI problem for the given vertex set. A_i are divided by
/// `decay` so feasibility certifies contraction at that rate; margins of the
/// undecayed blocks are what the schedule reports.
LmiProblem build_lemma4_problem(const std::vector<Mat>& A_i, const Vec& B,
                                double decay, double margin_tau, double box);

/// Extracts (Q_i, G_i, R_i) from a stacked LMI solution vector.
void unpack_lemma4_solution(const Vec& x, int n, int N,
                            std::vector<Mat>& Q, std::vector<Mat>& G,
                            std::vector<RowVec>& R);

StabilizerSchedule synthesize_gains(const AugmentedSystem& sys, const PolytopeGrid& grid,
                                    const SynthesisOptions& opts = {});

/// Reduced-order observer of x_b, driven by e2 (Theorem-1 coordinates).
class ReducedObserver {
  public:
    ReducedObserver(const AugmentedSystem& sys, const Vec& H);

    Vec xb_hat(double e2) const { return zhat_ + H_ * e2; }
    void advance(double e2, double u_st, const Vec& alpha);
    void reset() { zhat_.setZero(); }

  private:
    Vec zhat_;
    Vec H_;
    Mat Aob_;      ///< A22 - H A12, constant
    Vec Bob_;      ///< B2 - H B1, constant
    RowVec A12_;
    Mat A22_;
    double B1_;
    Vec B2_;
    const AugmentedSystem* sys_;
};

/// u_st = K(x1) [x_o1; xb_hat]. Throws OutOfRange outside the grid.
double stabilizer_output(const StabilizerSchedule& sched, double x_o1, const Vec& xb_hat,
                         double x1);

/// Diagnostic for the time-varying Lyapunov decrement along a sigma trajectory:
/// V(k) = x' (sum sigma_i Q_i^{-1}) x under x(k+1) = (A(sigma)+B K(sigma)) x.
/// Returns the maximum ratio V(k+1)/V(k) observed.
double lyapunov_decrement_ratio(const AugmentedSystem& sys, const StabilizerSchedule& sched,
                                const std::vector<double>& x1_path, const Vec& x0);

} // namespace imc
