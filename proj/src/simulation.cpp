#include "imc/simulation.hpp"

#include <cmath>
#include <sstream>

#include "imc/contour_error.hpp"
#include "imc/errors.hpp"
#include "imc/exosystem.hpp"
#include "imc/internal_model.hpp"
#include "imc/stabilizer.hpp"

namespace imc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Piecewise-linear interpolation of a tabulated alpha schedule over the
// monotone position variable; clamps outside the tabulated span.
struct AlphaTable {
    std::vector<double> v;
    std::vector<Vec> alpha;

    Vec at(double x) const {
        if (x <= v.front()) return alpha.front();
        if (x >= v.back()) return alpha.back();
        std::size_t hi = std::upper_bound(v.begin(), v.end(), x) - v.begin();
        const std::size_t lo = hi - 1;
        const double s = (x - v[lo]) / (v[hi] - v[lo]);
        return (1 - s) * alpha[lo] + s * alpha[hi];
    }
};

struct GeneratorTrack {
    std::vector<Eigen::Vector2d> w;     // reference generator states, 0..N+2
    std::vector<Eigen::Matrix2d> Sd;    // exact transitions, 0..N+1
    std::vector<Vec> alpha;             // ltv coefficients, 0..N
    double companion_offset = 0;
};

// Builds the reference generator track for one slave from the sampled
// position variable. The companion offset is raised when the generator state
// would pass too close to the origin.
GeneratorTrack build_track(const SlaveFnSpec& fn, const std::vector<double>& v, double Ts) {
    GeneratorTrack tk;
    const std::size_t n = v.size();
    tk.w.resize(n);
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0;
    for (std::size_t k = 0; k < n; ++k) {
        tk.w[k] = Eigen::Vector2d(fn.eval(v[k]), fn.companion(v[k]));
        const double l = tk.w[k].norm();
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    if (lmin <= 1e-3 * std::max(lmax, 1.0)) {
        double gmin = std::numeric_limits<double>::infinity();
        for (const auto& wk : tk.w) gmin = std::min(gmin, wk(1));
        tk.companion_offset = 1.0 - std::min(gmin, 0.0) + 1.0;
        for (auto& wk : tk.w) wk(1) += tk.companion_offset;
    }
    tk.Sd.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        tk.Sd[k] = transition_from_rates(rates_from_states(tk.w[k], tk.w[k + 1], Ts), Ts);
    tk.alpha.resize(n - 2);
    for (std::size_t k = 0; k + 2 < n; ++k)
        tk.alpha[k] = ltv_alpha(tk.Sd[k], tk.Sd[k + 1]);
    return tk;
}

struct CurveGeometry {
    CurveFn point;
    CurveFn tangent;
};

CurveGeometry make_curve(const Scenario& sc) {
    CurveGeometry g;
    if (sc.composition == CompositionType::four_axis_xy) {
        const auto fx2 = sc.slave_fns[0];
        const auto fx3 = sc.slave_fns[1];
        const auto fx4 = sc.slave_fns[2];
        const double R = sc.master.R;
        g.point = [=](double v) {
            return Eigen::Vector2d(R * std::cos(v) + fx3.eval(v), fx2.eval(v) + fx4.eval(v));
        };
        g.tangent = [=](double v) {
            return Eigen::Vector2d(-R * std::sin(v) + fx3.deriv(v), fx2.deriv(v) + fx4.deriv(v));
        };
        return g;
    }
    const auto fn = sc.slave_fns[0];
    if (sc.kind == ContourKind::monotonic) {
        g.point = [=](double v) { return Eigen::Vector2d(v, fn.eval(v)); };
        g.tangent = [=](double v) { return Eigen::Vector2d(1.0, fn.deriv(v)); };
    } else {
        const double R = sc.master.R;
        g.point = [=](double v) { return Eigen::Vector2d(R * std::cos(v), fn.eval(v)); };
        g.tangent = [=](double v) { return Eigen::Vector2d(-R * std::sin(v), fn.deriv(v)); };
    }
    return g;
}

struct TvImccAxis {
    ParamSolver solver;
    AugmentedSystem aug;
    StabilizerSchedule sched;
    InternalModel im;
    ReducedObserver obs;
    double grid_lo, grid_hi;

    TvImccAxis(const PlantDT& plant, const CanonicalForm& canon, const AlphaTable& table,
               const StabilizerConfig& cfg, double vlo, double vhi)
        : solver(canon, cfg.placed_root),
          aug(build_augmented([table](double x) { return table.at(x); }, canon.H, plant.n())),
          sched(), im(plant, 2), obs(aug, Vec::Zero(std::max(plant.n() - 1, 0))) {
        const double span = std::max(vhi - vlo, 1e-9);
        const double pad = cfg.grid_margin * span;
        Vec vertices = Vec::LinSpaced(cfg.grid_N, vlo - pad, vhi + pad);
        SynthesisOptions opts;
        opts.observer_radius = cfg.observer_radius;
        opts.decay = cfg.decay;
        opts.margin_tau = cfg.margin_tau;
        opts.box = cfg.box;
        sched = synthesize_gains(aug, make_grid(aug, vertices), opts);
        obs = ReducedObserver(aug, sched.H);
        grid_lo = sched.grid.lo();
        grid_hi = sched.grid.hi();
    }
};

} // namespace

std::string SynthesisReport::text() const {
    std::ostringstream os;
    os.precision(12);
    os << "scenario_hash = " << std::hex << scenario_hash << std::dec << "\n";
    os << "sylvester_residual_max = " << sylvester_residual_max << "\n";
    os << "sylvester_residual_mean = " << sylvester_residual_mean << "\n";
    os << "lmi_solver_margin = " << lmi_solver_margin << "\n";
    os << "eq46_min_margin = " << eq46_min_margin << "\n";
    os << "placed_root_used = " << (placed_root_used ? "true" : "false") << "\n";
    os << "master_spectral_radius = " << master_spectral_radius
       << " (stable = " << (master_plant_stable ? "true" : "false") << ")\n";
    os << "slave_spectral_radius = " << slave_spectral_radius
       << " (stable = " << (slave_plant_stable ? "true" : "false") << ")\n";
    return os.str();
}

RunResult run_closed_loop(const Scenario& sc) {
    if (!(sc.Ts > 0)) throw ConfigError("run: Ts must be positive");
    if (!(sc.horizon >= 100 * sc.Ts)) throw ConfigError("run: horizon must be at least 100 Ts");
    if (sc.slave_fns.empty()) throw ConfigError("run: scenario has no slave axes");
    const int n_slaves = sc.n_slaves();
    if (sc.slave_controller == ControllerType::ccc &&
        sc.composition != CompositionType::master_slave_xy)
        throw ConfigError("run: ccc baseline is defined for two-axis contours only");
    if (sc.composition == CompositionType::four_axis_xy && n_slaves != 3)
        throw ConfigError("run: four-axis composition needs exactly 3 slaves");

    const double Ts = sc.Ts;
    const long N = static_cast<long>(std::floor(sc.horizon / Ts));
    const bool prescribed = sc.master_mode == MasterMode::prescribed;
    const bool tvimcc = sc.slave_controller == ControllerType::tvimcc;

    const ContourSpec spec = sc.contour();
    if (tvimcc) {
        const AssumptionReport rep = check_assumptions(spec, sc.horizon, Ts);
        if (!rep.pass) throw AssumptionFailure("contour assumptions failed: " + rep.message);
    }

    // --- reference trajectories ------------------------------------------------
    std::vector<double> x1_act(N + 3), x1_ref(N + 3), v_nom(N + 3);
    for (long k = 0; k <= N + 2; ++k) {
        const double t = k * Ts;
        x1_act[k] = sc.master.position(t);
        x1_ref[k] = sc.master.nominal(t);
        v_nom[k] = sc.kind == ContourKind::monotonic ? x1_ref[k] : sc.master.angle(t);
    }
    std::vector<double> v_act;
    if (sc.kind == ContourKind::monotonic) {
        v_act = x1_act;
    } else {
        v_act = unwrap_rotational(x1_act, sc.master.R > 0
                                              ? sc.master.R
                                              : estimate_amplitude(spec.master_gen, sc.horizon, Ts),
                                  spec.direction,
                                  static_cast<int>(std::floor(sc.master.phi0 / kPi)));
    }
    // tracked mode recomputes x1/v online; the dry-run values seed grids and curves
    const double v_lo = std::min(v_act.front(), v_act.back());
    const double v_hi = std::max(v_act.front(), v_act.back());

    // --- synthesis ----------------------------------------------------------------
    RunResult out;
    out.synthesis.scenario_hash = sc.hash();
    out.synthesis.master_spectral_radius = sc.master_plant.spectral_radius();
    out.synthesis.slave_spectral_radius = sc.slave_plant.spectral_radius();
    out.synthesis.master_plant_stable = sc.master_plant.is_stable();
    out.synthesis.slave_plant_stable = sc.slave_plant.is_stable();

    std::vector<GeneratorTrack> tracks;
    std::vector<TvImccAxis> axes;
    if (tvimcc) {
        PlantDT canon_plant;
        try {
            canon_plant = to_observer_canonical(sc.slave_plant);
        } catch (const NotObservable& e) {
            throw SynthesisFailure(std::string("slave plant not observable: ") + e.what());
        }
        if (canon_plant.n() != 2)
            throw SynthesisFailure("tv-imcc path requires a second-order slave plant (n = rho = 2)");
        tracks.reserve(n_slaves);
        axes.reserve(n_slaves);
        for (int s = 0; s < n_slaves; ++s) {
            tracks.push_back(build_track(sc.slave_fns[s], v_act, Ts));
            AlphaTable table;
            table.v.assign(v_act.begin(), v_act.begin() + (N + 1));
            table.alpha.assign(tracks[s].alpha.begin(), tracks[s].alpha.begin() + (N + 1));
            try {
                axes.emplace_back(sc.slave_plant, *canon_plant.canon, table, sc.stab, v_lo, v_hi);
            } catch (const SynthesisFailure&) {
                throw;
            } catch (const ImcError& e) {
                throw SynthesisFailure("gain synthesis failed for slave axis " +
                                       std::to_string(s + 2) + ": " + e.what());
            }
            const double margin = axes.back().sched.solver_margin;
            const double eq46 = axes.back().sched.eq46_margins.global;
            if (s == 0 || margin < out.synthesis.lmi_solver_margin)
                out.synthesis.lmi_solver_margin = margin;
            if (s == 0 || eq46 < out.synthesis.eq46_min_margin)
                out.synthesis.eq46_min_margin = eq46;
        }
    }

    // --- contour geometry -------------------------------------------------------
    const CurveGeometry geom = make_curve(sc);
    const double pad = 0.02 * std::max(v_hi - v_lo, 1e-6);
    const long segments = std::min<long>(std::max<long>(2 * N, 20000), 2000000);
    const CurvePolyline polyline(geom.point, v_lo - pad, v_hi + pad, segments, geom.tangent);

    // --- state -----------------------------------------------------------------------
    SimulationTrace& tr = out.trace;
    tr.Ts = Ts;
    tr.scenario_hash = sc.hash();
    tr.solver_margin = out.synthesis.lmi_solver_margin;
    tr.slaves.resize(n_slaves);
    tr.t.reserve(N + 1);
    for (auto& s : tr.slaves) {
        s.r2.reserve(N + 1); s.y2.reserve(N + 1); s.e2.reserve(N + 1);
        s.u2.reserve(N + 1); s.u_im.reserve(N + 1); s.u_st.reserve(N + 1);
    }

    std::vector<Vec> x2(n_slaves, Vec::Zero(sc.slave_plant.n()));
    std::vector<PidState> pid_states(n_slaves);
    PidState master_pid;
    Vec xm = Vec::Zero(sc.master_plant.n());
    Unwrapper online_unwrap(sc.master.R > 0 ? sc.master.R : 1.0, spec.direction,
                            static_cast<int>(std::floor(std::max(sc.master.phi0, 0.0) / kPi)));
    std::vector<Eigen::Vector2d> w_prev(n_slaves);  // tracked-mode backward states
    bool have_prev = false;
    double phi_hold = 0;

    double resid_sum = 0, resid_max = 0;
    long resid_count = 0;
    long ce_hint = -1;
    std::vector<double> e2_sq(n_slaves, 0.0);

    for (long k = 0; k <= N; ++k) {
        const double t = k * Ts;
        double x1;
        if (prescribed) {
            x1 = x1_act[k];
        } else {
            x1 = sc.master_plant.C2 * xm;
            x1_act[k] = x1;
        }
        double v;
        if (sc.kind == ContourKind::monotonic) v = x1;
        else v = prescribed ? v_act[k] : online_unwrap.next(x1);

        std::vector<double> y_now(n_slaves);
        for (int s = 0; s < n_slaves; ++s) y_now[s] = sc.slave_plant.C2 * x2[s];

        double master_extra_u = 0;
        for (int s = 0; s < n_slaves; ++s) {
            const double y2 = y_now[s];
            double r2 = 0, u2 = 0, u_im = 0, u_st = 0, e2 = 0;
            if (tvimcc) {
                Vec alpha;
                if (prescribed) {
                    r2 = tracks[s].w[k](0);
                    alpha = tracks[s].alpha[k];
                } else {
                    r2 = sc.slave_fns[s].eval(v);
                    Eigen::Vector2d w_now(r2, sc.slave_fns[s].companion(v) +
                                                  tracks[s].companion_offset);
                    if (have_prev) {
                        const Eigen::Matrix2d Sb = transition_from_rates(
                            rates_from_states(w_prev[s], w_now, Ts), Ts);
                        alpha = ltv_alpha(Sb, Sb);  // one-sample hold
                    } else {
                        alpha = frozen_alpha({0, 0}, Ts);
                    }
                    w_prev[s] = w_now;
                }
                e2 = y2 - r2;
                const auto& res = axes[s].solver.solve(alpha);
                resid_sum += res.sol.residual;
                resid_max = std::max(resid_max, res.sol.residual);
                ++resid_count;
                if (res.sol.placed) out.synthesis.placed_root_used = true;
                axes[s].im.set_module2(res.m2);
                const auto outs = axes[s].im.outputs();
                u_im = outs.u_im;
                const Vec xb = axes[s].obs.xb_hat(e2);
                const double vcl = std::clamp(v, axes[s].grid_lo, axes[s].grid_hi);
                u_st = stabilizer_output(axes[s].sched, e2, xb, vcl);
                u2 = u_im + u_st;
                axes[s].obs.advance(e2, u_st, alpha);
                axes[s].im.advance(u2);
            } else {
                r2 = sc.slave_fns[s].eval(v_nom[k]);
                e2 = y2 - r2;
                const double e_track = r2 - y2;
                u2 = pid_step(pid_states[s], e_track, Ts, sc.gains.pid);
                if (sc.slave_controller == ControllerType::ccc) {
                    const double e_x = x1_ref[k] - x1;
                    double fp = sc.slave_fns[s].deriv(v_nom[k]);
                    double phi;
                    if (std::isfinite(fp)) {
                        phi = sc.kind == ContourKind::monotonic
                                  ? std::atan2(fp, 1.0)
                                  : std::atan2(fp, -sc.master.R * std::sin(v_nom[k]));
                        phi_hold = phi;
                    } else {
                        phi = phi_hold;
                    }
                    const CccCorrection corr = ccc_step(e_x, e_track, phi, sc.gains.ccc);
                    u2 += corr.du_y;
                    master_extra_u += corr.du_x;
                }
            }
            x2[s] = sc.slave_plant.G2 * x2[s] + sc.slave_plant.H2 * u2;
            e2_sq[s] += e2 * e2;

            auto& series = tr.slaves[s];
            series.r2.push_back(r2);
            series.y2.push_back(y2);
            series.e2.push_back(e2);
            series.u2.push_back(u2);
            series.u_im.push_back(u_im);
            series.u_st.push_back(u_st);
        }
        have_prev = true;

        if (!prescribed) {
            const double r1 = sc.master.position(t);
            const double u1 = pid_step(master_pid, r1 - x1, Ts, sc.gains.pid) + master_extra_u;
            xm = sc.master_plant.G2 * xm + sc.master_plant.H2 * u1;
        }

        Eigen::Vector2d P;
        if (sc.composition == CompositionType::four_axis_xy)
            P = Eigen::Vector2d(x1 + y_now[1], y_now[0] + y_now[2]);
        else
            P = Eigen::Vector2d(x1, y_now[0]);
        tr.t.push_back(t);
        tr.x1_ref.push_back(x1_ref[k]);
        tr.x1.push_back(x1);
        tr.contour_error.push_back(polyline.distance_near(P, v, &ce_hint));
        const bool masked =
            sc.metrics_coscut > 0 && std::fabs(std::cos(v)) < sc.metrics_coscut;
        tr.metrics_mask.push_back(masked ? 0 : 1);
    }

    out.synthesis.sylvester_residual_max = resid_max;
    out.synthesis.sylvester_residual_mean = resid_count ? resid_sum / resid_count : 0;
    out.metrics = compute_metrics(tr, sc.settle_threshold);
    out.slave_e2_rms.resize(n_slaves);
    for (int s = 0; s < n_slaves; ++s)
        out.slave_e2_rms[s] = std::sqrt(e2_sq[s] / (N + 1));
    return out;
}

} // namespace imc
