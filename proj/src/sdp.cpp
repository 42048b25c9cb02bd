#include "imc/sdp.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "imc/errors.hpp"

namespace imc {

namespace {

struct Barrier {
    const LmiProblem& prob;
    double tcap;

    // strict feasibility of (x, t)
    bool feasible(const Vec& x, double t) const {
        if (t >= tcap) return false;
        if (t <= -tcap) return false;
        for (int i = 0; i < prob.num_vars; ++i)
            if (std::fabs(x(i)) >= prob.box) return false;
        for (const auto& b : prob.blocks) {
            Mat F = b.F0;
            for (const auto& term : b.terms) F += x(term.var) * term.coeff;
            F.diagonal().array() -= t;
            Eigen::LLT<Mat> llt(F);
            if (llt.info() != Eigen::Success) return false;
        }
        return true;
    }

    // phi = -t/mu + sum_b -logdet(F_b - tI) + box barriers + t-cap barriers
    double value(const Vec& x, double t, double mu) const {
        double phi = -t / mu;
        for (const auto& b : prob.blocks) {
            Mat F = b.F0;
            for (const auto& term : b.terms) F += x(term.var) * term.coeff;
            F.diagonal().array() -= t;
            Eigen::LLT<Mat> llt(F);
            if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            double logdet = 0;
            for (int i = 0; i < F.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
            phi -= 2.0 * logdet;
        }
        for (int i = 0; i < prob.num_vars; ++i)
            phi -= std::log(prob.box - x(i)) + std::log(prob.box + x(i));
        phi -= std::log(tcap - t) + std::log(tcap + t);
        return phi;
    }

    void grad_hess(const Vec& x, double t, double mu, Vec& g, Mat& Hm) const {
        const int m = prob.num_vars;
        g = Vec::Zero(m + 1);
        Hm = Mat::Zero(m + 1, m + 1);
        g(m) = -1.0 / mu;
        for (const auto& b : prob.blocks) {
            Mat F = b.F0;
            for (const auto& term : b.terms) F += x(term.var) * term.coeff;
            F.diagonal().array() -= t;
            const Mat E = F.llt().solve(Mat::Identity(b.dim(), b.dim()));
            const int nl = static_cast<int>(b.terms.size());
            std::vector<Mat> EF(nl);
            for (int a = 0; a < nl; ++a) EF[a] = E * b.terms[a].coeff;
            // gradient
            for (int a = 0; a < nl; ++a) g(b.terms[a].var) -= EF[a].trace();
            g(m) += E.trace();  // d/dt of -logdet(F - tI)
            // Hessian
            for (int a = 0; a < nl; ++a) {
                const int va = b.terms[a].var;
                for (int c = a; c < nl; ++c) {
                    const int vc = b.terms[c].var;
                    const double h = (EF[a] * EF[c]).trace();
                    Hm(va, vc) += h;
                    if (va != vc) Hm(vc, va) += h;
                    else if (a != c) Hm(va, vc) += h;  // same var twice in one block
                }
                const double ht = -(E * EF[a]).trace();
                Hm(va, m) += ht;
                Hm(m, va) += ht;
            }
            Hm(m, m) += (E * E).trace();
        }
        for (int i = 0; i < m; ++i) {
            const double lo = prob.box + x(i), hi = prob.box - x(i);
            g(i) += 1.0 / hi - 1.0 / lo;
            Hm(i, i) += 1.0 / (hi * hi) + 1.0 / (lo * lo);
        }
        const double thi = tcap - t, tlo = tcap + t;
        g(m) += 1.0 / thi - 1.0 / tlo;
        Hm(m, m) += 1.0 / (thi * thi) + 1.0 / (tlo * tlo);
    }
};

} // namespace

LmiSolution solve_lmi_feasibility(const LmiProblem& problem) {
    for (const auto& b : problem.blocks) {
        if (b.F0.rows() != b.F0.cols()) throw DimensionMismatch("lmi: non-square block");
        for (const auto& t : b.terms)
            if (t.var < 0 || t.var >= problem.num_vars)
                throw DimensionMismatch("lmi: term variable index out of range");
    }
    Barrier bar{problem, 10.0 * problem.box};

    Vec x = Vec::Zero(problem.num_vars);
    // strictly feasible start: t below the smallest eigenvalue at x = 0
    double t = 0;
    {
        double lam_min = std::numeric_limits<double>::infinity();
        for (const auto& b : problem.blocks) {
            Eigen::SelfAdjointEigenSolver<Mat> es(b.F0);
            lam_min = std::min(lam_min, es.eigenvalues().minCoeff());
        }
        if (!std::isfinite(lam_min)) lam_min = 0;
        t = lam_min - std::max(1.0, std::fabs(lam_min));
    }

    const int m = problem.num_vars;
    Vec g;
    Mat Hm;
    int steps = 0;
    const int max_outer = 48, max_inner = 120;
    double mu = std::max(1.0, std::fabs(t));
    const double mu_floor = 1e-13 * std::max(1.0, std::fabs(t));
    bool reached_floor = false;

    for (int outer = 0; outer < max_outer; ++outer) {
        for (int inner = 0; inner < max_inner; ++inner) {
            bar.grad_hess(x, t, mu, g, Hm);
            Eigen::LDLT<Mat> ldlt(Hm);
            Vec step = -ldlt.solve(g);
            if (!step.allFinite()) {
                Hm.diagonal().array() += 1e-12 * Hm.diagonal().cwiseAbs().maxCoeff() + 1e-300;
                step = -Hm.ldlt().solve(g);
                if (!step.allFinite()) throw LmiMaxIterations("lmi: Newton system degenerate");
            }
            const double decrement = -0.5 * g.dot(step);
            ++steps;
            // backtracking line search on the barrier value
            const double phi0 = bar.value(x, t, mu);
            double s = 1.0;
            Vec xn;
            double tn = t;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                xn = x + s * step.head(m);
                tn = t + s * step(m);
                if (bar.feasible(xn, tn) && bar.value(xn, tn, mu) <= phi0 - 1e-4 * s * 2.0 * std::max(decrement, 0.0)) {
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted) break;  // stalled at this mu; shrink mu
            x = xn;
            t = tn;
            if (decrement < 1e-11 * (1.0 + std::fabs(t))) break;
        }
        if (mu <= mu_floor) {
            reached_floor = true;
            break;
        }
        mu = std::max(mu * 0.2, mu_floor);
    }
    if (!reached_floor)
        throw LmiMaxIterations("lmi: iteration schedule exhausted before barrier floor");

    if (t <= 1e-9)
        throw LmiInfeasible("lmi: maximized margin " + std::to_string(t) +
                            " is not positive; no strictly feasible point");
    if (t < problem.margin_target)
        throw LmiInfeasible("lmi: maximized margin " + std::to_string(t) +
                            " below margin target");
    return {x, t, steps};
}

MarginReport check_solution(const LmiProblem& problem, const Vec& x) {
    MarginReport rep;
    rep.global = std::numeric_limits<double>::infinity();
    rep.per_block.reserve(problem.blocks.size());
    for (const auto& b : problem.blocks) {
        Mat F = b.F0;
        for (const auto& term : b.terms) F += x(term.var) * term.coeff;
        Eigen::SelfAdjointEigenSolver<Mat> es(F);
        const double mineig = es.eigenvalues().minCoeff();
        rep.per_block.push_back(mineig);
        rep.global = std::min(rep.global, mineig);
    }
    if (problem.blocks.empty()) rep.global = 0;
    return rep;
}

void dump_problem(const LmiProblem& problem, std::ostream& os) {
    os.precision(17);
    os << "lmi-problem v1\n";
    os << "vars " << problem.num_vars << "\n";
    os << "margin " << problem.margin_target << "\n";
    os << "box " << problem.box << "\n";
    os << "blocks " << problem.blocks.size() << "\n";
    for (const auto& b : problem.blocks) {
        os << "block " << b.dim() << " " << b.terms.size() << "\n";
        for (int r = 0; r < b.dim(); ++r)
            for (int c = 0; c < b.dim(); ++c)
                os << b.F0(r, c) << (c + 1 == b.dim() ? "\n" : " ");
        for (const auto& term : b.terms) {
            os << "term " << term.var << "\n";
            for (int r = 0; r < b.dim(); ++r)
                for (int c = 0; c < b.dim(); ++c)
                    os << term.coeff(r, c) << (c + 1 == b.dim() ? "\n" : " ");
        }
    }
}

LmiProblem load_problem(std::istream& is) {
    LmiProblem p;
    std::string word, version;
    is >> word >> version;
    if (word != "lmi-problem") throw ParseError("lmi load: bad header");
    std::size_t nblocks = 0;
    is >> word >> p.num_vars;
    is >> word >> p.margin_target;
    is >> word >> p.box;
    is >> word >> nblocks;
    for (std::size_t k = 0; k < nblocks; ++k) {
        int dim = 0;
        std::size_t nterms = 0;
        is >> word >> dim >> nterms;
        if (word != "block" || dim <= 0) throw ParseError("lmi load: bad block header");
        LmiBlock b;
        b.F0.resize(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) is >> b.F0(r, c);
        for (std::size_t ti = 0; ti < nterms; ++ti) {
            LmiTerm t;
            is >> word >> t.var;
            if (word != "term") throw ParseError("lmi load: bad term header");
            t.coeff.resize(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) is >> t.coeff(r, c);
            b.terms.push_back(std::move(t));
        }
        p.blocks.push_back(std::move(b));
    }
    if (!is) throw ParseError("lmi load: truncated input");
    return p;
}

} // namespace imc
