#include "imc/linalg.hpp"

namespace imc {

Vec char_poly(const Mat& A) {
    const int n = static_cast<int>(A.rows());
    Vec c(n);
    Mat M = Mat::Zero(n, n);
    // Faddeev-LeVerrier: M_{k} = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k)/k
    Mat I = Mat::Identity(n, n);
    Mat Mk = I;
    for (int k = 1; k <= n; ++k) {
        M = A * Mk;
        c(k - 1) = -M.trace() / k;
        Mk = M + c(k - 1) * I;
    }
    return c;
}

Mat observer_companion(const Vec& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    Mat A = Mat::Zero(n, n);
    A.col(0) = -coeffs;
    A.topRightCorner(n - 1, n - 1).setIdentity();
    return A;
}

double spectral_radius(const Mat& A) {
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

Mat observability_matrix(const Mat& A, const RowVec& C) {
    const int n = static_cast<int>(A.rows());
    Mat O(n, n);
    RowVec row = C;
    for (int i = 0; i < n; ++i) {
        O.row(i) = row;
        row = row * A;
    }
    return O;
}

bool is_observable(const Mat& A, const RowVec& C, double tol) {
    Eigen::FullPivLU<Mat> lu(observability_matrix(A, C));
    lu.setThreshold(tol);
    return lu.rank() == A.rows();
}

bool is_controllable(const Mat& A, const Vec& B, double tol) {
    const int n = static_cast<int>(A.rows());
    Mat Ctrb(n, n);
    Vec col = B;
    for (int i = 0; i < n; ++i) {
        Ctrb.col(i) = col;
        col = A * col;
    }
    Eigen::FullPivLU<Mat> lu(Ctrb);
    lu.setThreshold(tol);
    return lu.rank() == n;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace imc
