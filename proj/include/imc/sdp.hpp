#pragma once

#include <iosfwd>
#include <vector>

#include "imc/linalg.hpp"

namespace imc {

/// One affine symmetric constraint block F0 + sum_i x_{var_i} * coeff_i > 0.
/// Coefficient matrices are symmetrized on construction.
struct LmiTerm {
    int var = 0;
    Mat coeff;
};

struct LmiBlock {
    Mat F0;
    std::vector<LmiTerm> terms;
    int dim() const { return static_cast<int>(F0.rows()); }
};

struct LmiProblem {
    int num_vars = 0;
    std::vector<LmiBlock> blocks;
    double margin_target = 1e-8;  ///< tau: required uniform margin
    double box = 1e9;             ///< |x_i| bound making margin maximization well posed
};

struct LmiSolution {
    Vec x;
    double margin = 0;   ///< maximized uniform margin t*
    int newton_steps = 0;
};

/// Margin maximization max t s.t. F_b(x) >= t I, |x_i| <= box, via a
/// deterministic log-barrier path following. Throws LmiInfeasible when the
/// maximized margin is <= 0 within 1e-9 (or below margin_target), and
/// LmiMaxIterations when the fixed iteration schedule is exhausted without
/// reaching the barrier floor.
LmiSolution solve_lmi_feasibility(const LmiProblem& problem);

struct MarginReport {
    std::vector<double> per_block;  ///< min eigenvalue of each block at the assignment
    double global = 0;
    bool feasible_at(double tau) const { return global >= tau; }
};

/// Independent eigenvalue check of every block (SelfAdjointEigenSolver;
/// shares nothing with the solver's internal factorization state).
MarginReport check_solution(const LmiProblem& problem, const Vec& x);

/// Plain-text dump/load for external cross-checking; one block per section,
/// row-major numbers.
void dump_problem(const LmiProblem& problem, std::ostream& os);
LmiProblem load_problem(std::istream& is);

} // namespace imc
