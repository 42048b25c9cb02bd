#pragma once

#include <unordered_map>

#include "imc/linalg.hpp"
#include "imc/plant.hpp"

namespace imc {

/// Coefficient-level operators of the per-sample Sylvester equation.
/// All three are (2*rho - 1) x rho, built over the degree ladder
/// z^{2 rho - 2} .. z^0 (the trivial monic row is dropped):
///   O_X * [1; q]  = coefficients of x(z) * qtilde(z) below the monic term,
///   C_Psi1 * p    = coefficients of n(z) * ptilde(z).
/// Columns of the O operators are shifted copies of the previous column.
struct ConvolutionOps {
    Mat O_S;
    Mat O_Phi1;
    Mat C_Psi1;
    int rho = 0;
};

/// alpha: exosystem coefficients (rho), plant_canon: observer-canonical
/// realization providing characteristic coefficients and numerator data F0.
ConvolutionOps build_convolution_ops(const Vec& alpha_exo, const CanonicalForm& plant_canon);

struct SylvesterSolution {
    Vec q;            ///< (rho-1) module-2 denominator coefficients
    Vec p;            ///< rho module-2 numerator coefficients
    double residual = 0;
    bool placed = false;  ///< true when the complementary-root variant was used
    double c = 0;         ///< placed complementary root coefficient
};

/// Solves Eq-35 as displayed (complementary polynomial = qtilde itself).
/// Minimal-norm solution; throws SingularSystem when the stacked system is
/// inconsistent (plant zero resonant with an exosystem mode).
SylvesterSolution solve_sylvester(const ConvolutionOps& ops);

/// Generalized family d*qtilde + n*ptilde = pi_S*(z^{rho-1} + c...), with the
/// complementary polynomial fixed to coefficients `c` instead of q.
SylvesterSolution solve_sylvester_placed(const ConvolutionOps& ops, const Vec& c);

/// Module-2 parameter set in controller canonical form.
struct Module2 {
    Mat Phi2;
    Vec Psi2;
    RowVec Gamma2;
    double D2 = 0;
};

/// Companion of qtilde plus polynomial division of ptilde by qtilde:
/// D2 = leading p coefficient, Gamma2 = remainder coefficients.
Module2 assemble_module2(const Vec& q, const Vec& p);

/// Solves for module-2 parameters given exosystem coefficients, preferring the
/// literal Eq-35 solution and falling back to the placed-root variant when the
/// implied module-2 pole set is not Schur stable. Results are cached on the
/// exact bit pattern of alpha.
class ParamSolver {
  public:
    ParamSolver(CanonicalForm plant_canon, double placed_root = 0.0,
                double stability_margin = 1e-9);

    struct Result {
        SylvesterSolution sol;
        Module2 m2;
    };

    const Result& solve(const Vec& alpha);

    const CanonicalForm& canon() const { return canon_; }

  private:
    CanonicalForm canon_;
    double placed_root_;
    double stability_margin_;
    std::unordered_map<std::string, Result> cache_;
};

/// Runtime two-module time-varying internal model. Module 1 is the plant
/// copy (G2, H2, C2); module 2 parameters are scheduled per sample.
class InternalModel {
  public:
    InternalModel(const PlantDT& plant, int rho);

    void set_module2(const Module2& m2) { m2_ = m2; }

    struct Outputs {
        double u_r = 0;
        double u_im = 0;
    };

    /// Outputs from the current states; does not advance.
    Outputs outputs() const;

    /// Advances both module states with the composed plant input u2.
    void advance(double u2);

    /// Convenience: outputs then advance; returns u_im(k).
    double step(double u2, long k);

    const Vec& xi1() const { return xi1_; }
    const Vec& xi2() const { return xi2_; }
    void reset();

  private:
    Mat G_;
    Vec H_;
    RowVec C_;
    Module2 m2_;
    Vec xi1_;
    Vec xi2_;
};

} // namespace imc
