#include "imc/internal_model.hpp"

#include <cmath>
#include <cstring>

#include "imc/errors.hpp"

namespace imc {

namespace {

// Banded operator over the dropped-monic degree ladder, see header.
Mat shifted_poly_operator(const Vec& monic_tail, int rho) {
    // monic_tail = [x1 .. x_rho] of x(z) = z^rho + x1 z^{rho-1} + ... + x_rho
    Mat O = Mat::Zero(2 * rho - 1, rho);
    for (int i = 0; i < 2 * rho - 1; ++i) {
        for (int j = 0; j < rho; ++j) {
            const int idx = i + 1 - j;  // coefficient x_idx, x_0 = 1
            if (idx == 0) O(i, j) = 1.0;
            else if (idx >= 1 && idx <= rho) O(i, j) = monic_tail(idx - 1);
        }
    }
    return O;
}

Mat stacked_unknown_matrix(const ConvolutionOps& ops, bool subtract_exo_columns) {
    const int rho = ops.rho;
    const int rows = 2 * rho - 1;
    Mat M(rows, rows);  // unknowns: q (rho-1), p (rho)
    M.leftCols(rho - 1) = ops.O_Phi1.rightCols(rho - 1);
    if (subtract_exo_columns) M.leftCols(rho - 1) -= ops.O_S.rightCols(rho - 1);
    M.rightCols(rho) = ops.C_Psi1;
    return M;
}

SylvesterSolution solve_stacked(const Mat& M, const Vec& rhs, int rho) {
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(M);
    const Vec x = cod.solve(rhs);
    SylvesterSolution sol;
    sol.q = x.head(rho - 1);
    sol.p = x.tail(rho);
    const double scale = std::max(1.0, rhs.norm());
    sol.residual = (M * x - rhs).norm();
    if (sol.residual > 1e-8 * scale)
        throw SingularSystem("solve_sylvester: inconsistent system; a plant zero coincides "
                             "with an exosystem mode at this sample");
    return sol;
}

std::string alpha_key(const Vec& alpha) {
    std::string key(alpha.size() * sizeof(double), '\0');
    std::memcpy(key.data(), alpha.data(), key.size());
    return key;
}

} // namespace

ConvolutionOps build_convolution_ops(const Vec& alpha_exo, const CanonicalForm& plant_canon) {
    const int rho = static_cast<int>(alpha_exo.size());
    if (plant_canon.char_coeffs.size() != rho || plant_canon.H.size() != rho)
        throw DimensionMismatch("build_convolution_ops: plant order must equal rho");
    ConvolutionOps ops;
    ops.rho = rho;
    ops.O_S = shifted_poly_operator(alpha_exo, rho);
    ops.O_Phi1 = shifted_poly_operator(plant_canon.char_coeffs, rho);
    // C_Psi1 columns are F0 shifted down one row per column (Eq. 37 recursion)
    ops.C_Psi1 = Mat::Zero(2 * rho - 1, rho);
    for (int j = 0; j < rho; ++j)
        ops.C_Psi1.block(j, j, rho, 1) = plant_canon.H;
    return ops;
}

SylvesterSolution solve_sylvester(const ConvolutionOps& ops) {
    const int rho = ops.rho;
    const Mat M = stacked_unknown_matrix(ops, true);
    const Vec rhs = ops.O_S.col(0) - ops.O_Phi1.col(0);
    SylvesterSolution sol = solve_stacked(M, rhs, rho);
    sol.placed = false;
    return sol;
}

SylvesterSolution solve_sylvester_placed(const ConvolutionOps& ops, const Vec& c) {
    const int rho = ops.rho;
    if (c.size() != rho - 1)
        throw DimensionMismatch("solve_sylvester_placed: complementary polynomial size");
    const Mat M = stacked_unknown_matrix(ops, false);
    Vec stacked(rho);
    stacked(0) = 1;
    stacked.tail(rho - 1) = c;
    const Vec rhs = ops.O_S * stacked - ops.O_Phi1.col(0);
    SylvesterSolution sol = solve_stacked(M, rhs, rho);
    sol.placed = true;
    sol.c = rho > 1 ? c(0) : 0;
    return sol;
}

Module2 assemble_module2(const Vec& q, const Vec& p) {
    const int m = static_cast<int>(q.size());  // rho - 1
    Module2 out;
    out.D2 = p(0);
    if (m == 0) {
        out.Phi2 = Mat::Zero(0, 0);
        out.Psi2 = Vec::Zero(0);
        out.Gamma2 = RowVec::Zero(0);
        return out;
    }
    out.Phi2 = Mat::Zero(m, m);
    out.Phi2.row(0) = -q.transpose();
    if (m > 1) out.Phi2.bottomLeftCorner(m - 1, m - 1).setIdentity();
    out.Psi2 = Vec::Zero(m);
    out.Psi2(0) = 1;
    // remainder of ptilde / qtilde
    out.Gamma2 = RowVec::Zero(m);
    for (int i = 0; i < m; ++i) out.Gamma2(i) = p(i + 1) - p(0) * q(i);
    return out;
}

ParamSolver::ParamSolver(CanonicalForm plant_canon, double placed_root, double stability_margin)
    : canon_(std::move(plant_canon)), placed_root_(placed_root),
      stability_margin_(stability_margin) {}

const ParamSolver::Result& ParamSolver::solve(const Vec& alpha) {
    const std::string key = alpha_key(alpha);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const ConvolutionOps ops = build_convolution_ops(alpha, canon_);
    SylvesterSolution sol = solve_sylvester(ops);
    Module2 m2 = assemble_module2(sol.q, sol.p);
    const bool stable = m2.Phi2.size() == 0 ||
                        spectral_radius(m2.Phi2) < 1.0 - stability_margin_;
    if (!stable) {
        // Module-2 poles sit at the plant numerator roots; when those are not
        // Schur the cancellation is an unobservable growing mode. Re-solve with
        // the complementary closed-loop root pinned instead.
        Vec c = Vec::Constant(alpha.size() - 1, placed_root_);
        sol = solve_sylvester_placed(ops, c);
        m2 = assemble_module2(sol.q, sol.p);
    }
    auto [ins, ok] = cache_.emplace(key, Result{std::move(sol), std::move(m2)});
    (void)ok;
    return ins->second;
}

InternalModel::InternalModel(const PlantDT& plant, int rho)
    : G_(plant.G2), H_(plant.H2), C_(plant.C2) {
    if (plant.n() < rho)
        throw DimensionMismatch("InternalModel: plant order below exosystem order; augment first");
    xi1_ = Vec::Zero(plant.n());
    xi2_ = Vec::Zero(rho - 1);
    m2_.Phi2 = Mat::Zero(rho - 1, rho - 1);
    m2_.Psi2 = Vec::Zero(rho - 1);
    m2_.Gamma2 = RowVec::Zero(rho - 1);
}

InternalModel::Outputs InternalModel::outputs() const {
    Outputs o;
    o.u_r = C_ * xi1_;
    o.u_im = (m2_.Gamma2.size() ? double(m2_.Gamma2 * xi2_) : 0.0) + m2_.D2 * (-o.u_r);
    return o;
}

void InternalModel::advance(double u2) {
    const double u_r = C_ * xi1_;
    xi1_ = G_ * xi1_ + H_ * u2;
    if (xi2_.size()) xi2_ = m2_.Phi2 * xi2_ + m2_.Psi2 * (-u_r);
}

double InternalModel::step(double u2, long) {
    const Outputs o = outputs();
    advance(u2);
    return o.u_im;
}

void InternalModel::reset() {
    xi1_.setZero();
    xi2_.setZero();
}

} // namespace imc
