#include <CLI11.hpp>

#include "imc/cli.hpp"
#include "imc/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"contour-imc: time-varying internal-model contouring control simulator"};
    app.require_subcommand(1);

    imc::RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run one scenario and write trace/metrics/synthesis files");
    run->add_option("--scenario", run_opts.scenario, "builtin scenario name (sinusoid|circle|heart|four_axis)");
    run->add_option("--config", run_opts.config_path, "config file with dotted keys");
    run->add_option("--set", run_opts.sets, "override key=value (repeatable)");
    run->add_option("--out", run_opts.out_dir, "output directory")->capture_default_str();
    run->add_option("--ts", run_opts.ts, "sampling period override [s]");
    run->add_option("--horizon", run_opts.horizon, "horizon override [s]");

    imc::CompareOptions cmp_opts;
    auto* cmp = app.add_subcommand("compare", "run scenario x controller grid and tabulate contour errors");
    cmp->add_option("--scenario", cmp_opts.scenarios, "scenario names (repeatable)")->required();
    cmp->add_option("--controller", cmp_opts.controllers, "controllers (tvimcc|pid|ccc, repeatable)");
    cmp->add_option("--set", cmp_opts.sets, "override key=value (repeatable)");
    cmp->add_option("--out", cmp_opts.out_dir, "output directory")->capture_default_str();
    cmp->add_option("--ts", cmp_opts.ts, "sampling period override [s]");
    cmp->add_option("--horizon", cmp_opts.horizon, "horizon override [s]");

    imc::ReportOptions rep_opts;
    auto* rep = app.add_subcommand("report", "emit plot-ready downsampled series from trace CSVs");
    rep->add_option("traces", rep_opts.trace_files, "trace CSV files");
    rep->add_option("--out", rep_opts.out_dir, "output directory")->capture_default_str();
    rep->add_option("--downsample", rep_opts.downsample, "keep every n-th row")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? imc::kExitConfigError : imc::kExitOk;
    }

    if (run->parsed()) return imc::cmd_run(run_opts);
    if (cmp->parsed()) return imc::cmd_compare(cmp_opts);
    if (rep->parsed()) return imc::cmd_report(rep_opts);
    return imc::kExitConfigError;
}
