#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace imc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

/// Monic characteristic polynomial coefficients [c1 .. cn] of an n x n matrix,
/// i.e. det(zI - A) = z^n + c1 z^{n-1} + ... + cn (Faddeev-LeVerrier).
Vec char_poly(const Mat& A);

/// Companion matrix in observer form: first column -coeffs, identity shifted right.
/// char poly of the result is z^n + coeffs(0) z^{n-1} + ... + coeffs(n-1).
Mat observer_companion(const Vec& coeffs);

double spectral_radius(const Mat& A);

/// Observability matrix [C; CA; ...; CA^{n-1}].
Mat observability_matrix(const Mat& A, const RowVec& C);

bool is_observable(const Mat& A, const RowVec& C, double tol = 1e-9);
bool is_controllable(const Mat& A, const Vec& B, double tol = 1e-9);

/// FNV-1a 64-bit over a byte string; used for scenario hashes.
std::uint64_t fnv1a(const std::string& data);

} // namespace imc
