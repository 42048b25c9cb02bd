#include "imc/stabilizer.hpp"

#include <cmath>

#include "imc/errors.hpp"

namespace imc {

Mat AugmentedSystem::A(const Vec& alpha) const {
    const int rho = static_cast<int>(alpha.size());
    Vec padded = Vec::Zero(n);
    padded.head(rho) = alpha;
    return observer_companion(padded);
}

RowVec AugmentedSystem::A12() const {
    RowVec r = RowVec::Zero(n - 1);
    if (n > 1) r(0) = 1;
    return r;
}

Vec AugmentedSystem::A21(const Vec& alpha) const {
    Vec v = Vec::Zero(n - 1);
    const int rho = static_cast<int>(alpha.size());
    for (int i = 1; i < rho && i < n; ++i) v(i - 1) = -alpha(i);
    return v;
}

Mat AugmentedSystem::A22() const {
    Mat m = Mat::Zero(n - 1, n - 1);
    if (n > 2) m.topRightCorner(n - 2, n - 2).setIdentity();
    return m;
}

AugmentedSystem build_augmented(std::function<Vec(double)> alpha_of, const Vec& B_canon, int n) {
    if (B_canon.size() != n) throw DimensionMismatch("build_augmented: B length != n");
    AugmentedSystem s;
    s.n = n;
    s.alpha_of = std::move(alpha_of);
    s.B = B_canon;
    return s;
}

PolytopeGrid make_grid(const AugmentedSystem& sys, const Vec& vertex_positions) {
    if (vertex_positions.size() < 2) throw OutOfRange("make_grid: need at least two vertices");
    for (int i = 1; i < vertex_positions.size(); ++i)
        if (!(vertex_positions(i) > vertex_positions(i - 1)))
            throw OutOfRange("make_grid: vertices must be strictly increasing");
    PolytopeGrid g;
    g.vertices = vertex_positions;
    g.A_i.reserve(vertex_positions.size());
    for (int i = 0; i < vertex_positions.size(); ++i) {
        g.alpha_i.push_back(sys.alpha_of(vertex_positions(i)));
        g.A_i.push_back(sys.A(g.alpha_i.back()));
    }
    return g;
}

Vec sigma_weights(double x1, const PolytopeGrid& grid) {
    const int N = grid.N();
    if (x1 < grid.lo() || x1 > grid.hi())
        throw OutOfRange("sigma_weights: scheduling variable outside the grid");
    Vec sigma = Vec::Zero(N);
    int j = 1;
    while (j < N - 1 && x1 > grid.vertices(j)) ++j;
    const double lo = grid.vertices(j - 1), hi = grid.vertices(j);
    const double left = (hi - x1) / (hi - lo);
    sigma(j - 1) = left;
    sigma(j) = 1.0 - left;
    return sigma;
}

namespace {

// Scalar-variable layout per vertex: Q (upper triangle, n(n+1)/2), G (n*n), R (n).
struct VarLayout {
    int n;
    int per_vertex() const { return n * (n + 1) / 2 + n * n + n; }
    int q_index(int v, int r, int c) const {  // r <= c
        return v * per_vertex() + r * n - r * (r - 1) / 2 + (c - r);
    }
    int g_index(int v, int r, int c) const {
        return v * per_vertex() + n * (n + 1) / 2 + r * n + c;
    }
    int r_index(int v, int c) const {
        return v * per_vertex() + n * (n + 1) / 2 + n * n + c;
    }
};

Mat sym_basis(int n, int r, int c) {
    Mat S = Mat::Zero(n, n);
    S(r, c) += 1;
    S(c, r) += 1;
    if (r == c) S(r, c) -= 1;
    return S;
}

} // namespace

LmiProblem build_lemma4_problem(const std::vector<Mat>& A_i, const Vec& B,
                                double decay, double margin_tau, double box) {
    const int N = static_cast<int>(A_i.size());
    const int n = static_cast<int>(B.size());
    VarLayout L{n};
    LmiProblem prob;
    prob.num_vars = N * L.per_vertex();
    prob.margin_target = margin_tau;
    prob.box = box;

    for (int i = 0; i < N; ++i) {
        const Mat Ai = A_i[i] / decay;
        for (int j = 0; j < N; ++j) {
            LmiBlock blk;
            blk.F0 = Mat::Zero(2 * n, 2 * n);
            // (1,1): G_i + G_i' - Q_i
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    Mat coeff = Mat::Zero(2 * n, 2 * n);
                    coeff.topLeftCorner(n, n)(r, c) += 1;  // G_i + G_i'
                    coeff.topLeftCorner(n, n)(c, r) += 1;
                    // off-diagonal: A_i G_i appears in (2,1); (1,2) is its transpose
                    Mat E = Mat::Zero(n, n);
                    E(r, c) = 1;
                    const Mat AE = Ai * E;
                    coeff.bottomLeftCorner(n, n) += AE;
                    coeff.topRightCorner(n, n) += AE.transpose();
                    blk.terms.push_back({L.g_index(i, r, c), coeff});
                }
            for (int r = 0; r < n; ++r)
                for (int c = r; c < n; ++c) {
                    Mat coeff = Mat::Zero(2 * n, 2 * n);
                    coeff.topLeftCorner(n, n) = -sym_basis(n, r, c);
                    blk.terms.push_back({L.q_index(i, r, c), coeff});
                }
            // (2,2): Q_j
            for (int r = 0; r < n; ++r)
                for (int c = r; c < n; ++c) {
                    Mat coeff = Mat::Zero(2 * n, 2 * n);
                    coeff.bottomRightCorner(n, n) = sym_basis(n, r, c);
                    blk.terms.push_back({L.q_index(j, r, c), coeff});
                }
            // B R_i in (2,1) and transpose in (1,2)
            for (int c = 0; c < n; ++c) {
                Mat coeff = Mat::Zero(2 * n, 2 * n);
                Mat BR = Mat::Zero(n, n);
                BR.col(c) = B;
                coeff.bottomLeftCorner(n, n) += BR;
                coeff.topRightCorner(n, n) += BR.transpose();
                blk.terms.push_back({L.r_index(i, c), coeff});
            }
            prob.blocks.push_back(std::move(blk));
        }
    }
    // Q_i > 0 blocks
    for (int i = 0; i < N; ++i) {
        LmiBlock blk;
        blk.F0 = Mat::Zero(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = r; c < n; ++c)
                blk.terms.push_back({L.q_index(i, r, c), sym_basis(n, r, c)});
        prob.blocks.push_back(std::move(blk));
    }
    return prob;
}

void unpack_lemma4_solution(const Vec& x, int n, int N,
                            std::vector<Mat>& Q, std::vector<Mat>& G,
                            std::vector<RowVec>& R) {
    VarLayout L{n};
    Q.assign(N, Mat::Zero(n, n));
    G.assign(N, Mat::Zero(n, n));
    R.assign(N, RowVec::Zero(n));
    for (int i = 0; i < N; ++i) {
        for (int r = 0; r < n; ++r)
            for (int c = r; c < n; ++c) {
                Q[i](r, c) = x(L.q_index(i, r, c));
                Q[i](c, r) = Q[i](r, c);
            }
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) G[i](r, c) = x(L.g_index(i, r, c));
        for (int c = 0; c < n; ++c) R[i](c) = x(L.r_index(i, c));
    }
}

namespace {

// A22 - H A12 is an observer companion of H, so placement is a polynomial
// coefficient match against prod (z - p_i), poles alternating +/- radius.
Vec place_observer_gain(int n, double radius) {
    const int m = n - 1;
    Vec poly = Vec::Zero(m + 1);  // coefficients of prod(z - p_i), monic first
    poly(0) = 1;
    int deg = 0;
    for (int i = 0; i < m; ++i) {
        const double p = radius * ((i % 2 == 0) ? -1.0 : 1.0);
        for (int k = deg + 1; k >= 1; --k) poly(k) = poly(k) - p * poly(k - 1);
        ++deg;
    }
    return poly.segment(1, m);  // H = tail coefficients
}

} // namespace

StabilizerSchedule synthesize_gains(const AugmentedSystem& sys, const PolytopeGrid& grid,
                                    const SynthesisOptions& opts) {
    StabilizerSchedule sched;
    sched.grid = grid;
    sched.observer_radius = opts.observer_radius;
    const int n = sys.n;
    const int N = grid.N();

    LmiProblem prob = build_lemma4_problem(grid.A_i, sys.B, opts.decay, opts.margin_tau, opts.box);
    const LmiSolution sol = solve_lmi_feasibility(prob);  // throws LmiInfeasible / MaxIterations
    sched.solver_margin = sol.margin;
    unpack_lemma4_solution(sol.x, n, N, sched.Q_i, sched.G_i, sched.R_i);
    sched.K_i.reserve(N);
    for (int i = 0; i < N; ++i)
        sched.K_i.push_back(sched.R_i[i] * sched.G_i[i].inverse());

    // Report margins of the undecayed Eq. 46 blocks at the found solution.
    const LmiProblem original =
        build_lemma4_problem(grid.A_i, sys.B, 1.0, opts.margin_tau, opts.box);
    sched.eq46_margins = check_solution(original, sol.x);

    if (n > 1) {
        sched.H = place_observer_gain(n, opts.observer_radius);
        const Mat Aob = sys.A22() - sched.H * sys.A12();
        if (spectral_radius(Aob) >= 1.0)
            throw ObserverPlacementFailure("observer placement did not contract");
    } else {
        sched.H = Vec::Zero(0);
    }
    return sched;
}

RowVec StabilizerSchedule::K_of(double x1) const {
    const Vec sigma = sigma_weights(x1, grid);
    RowVec K = RowVec::Zero(K_i[0].size());
    for (int i = 0; i < grid.N(); ++i)
        if (sigma(i) != 0.0) K += sigma(i) * K_i[i];
    return K;
}

ReducedObserver::ReducedObserver(const AugmentedSystem& sys, const Vec& H)
    : zhat_(Vec::Zero(sys.n - 1)), H_(H), A12_(sys.A12()), A22_(sys.A22()),
      B1_(sys.B1()), B2_(sys.B2()), sys_(&sys) {
    Aob_ = A22_ - H_ * A12_;
    Bob_ = B2_ - H_ * B1_;
}

void ReducedObserver::advance(double e2, double u_st, const Vec& alpha) {
    const Vec inject = (Aob_ * H_ + sys_->A21(alpha) - H_ * sys_->A11(alpha));
    zhat_ = Aob_ * zhat_ + Bob_ * u_st + inject * e2;
}

double stabilizer_output(const StabilizerSchedule& sched, double x_o1, const Vec& xb_hat,
                         double x1) {
    const RowVec K = sched.K_of(x1);  // throws OutOfRange via sigma_weights
    double u = K(0) * x_o1;
    for (int i = 0; i < xb_hat.size(); ++i) u += K(i + 1) * xb_hat(i);
    return u;
}

double lyapunov_decrement_ratio(const AugmentedSystem& sys, const StabilizerSchedule& sched,
                                const std::vector<double>& x1_path, const Vec& x0) {
    std::vector<Mat> Pinv;  // P_i = Q_i^{-1}
    Pinv.reserve(sched.Q_i.size());
    for (const auto& Q : sched.Q_i) Pinv.push_back(Q.inverse());
    auto P_of = [&](double v) {
        const Vec s = sigma_weights(v, sched.grid);
        Mat P = Mat::Zero(sys.n, sys.n);
        for (int i = 0; i < s.size(); ++i)
            if (s(i) != 0.0) P += s(i) * Pinv[i];
        return P;
    };
    Vec x = x0;
    double worst = 0;
    for (std::size_t k = 0; k + 1 < x1_path.size(); ++k) {
        const Vec sigma = sigma_weights(x1_path[k], sched.grid);
        Mat Asig = Mat::Zero(sys.n, sys.n);
        for (int i = 0; i < sigma.size(); ++i)
            if (sigma(i) != 0.0) Asig += sigma(i) * sched.grid.A_i[i];
        const RowVec K = sched.K_of(x1_path[k]);
        const double V0 = x.transpose() * P_of(x1_path[k]) * x;
        x = (Asig + sys.B * K) * x;
        const double V1 = x.transpose() * P_of(x1_path[k + 1]) * x;
        if (V0 > 0) worst = std::max(worst, V1 / V0);
    }
    return worst;
}

} // namespace imc
