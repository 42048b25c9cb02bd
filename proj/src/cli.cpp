#include "imc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "imc/config.hpp"
#include "imc/errors.hpp"
#include "imc/simulation.hpp"

namespace imc {

namespace fs = std::filesystem;

namespace {

Scenario scenario_from_options(const std::string& scenario_name, const std::string& config_path,
                               const std::vector<std::string>& sets,
                               const std::optional<double>& ts,
                               const std::optional<double>& horizon) {
    ConfigMap cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = parse_config_text(ss.str());
    }
    if (!scenario_name.empty()) cfg.entries.insert(cfg.entries.begin(), {"scenario", scenario_name});
    for (const auto& s : sets) {
        auto [k, v] = parse_set_expr(s);
        cfg.set(k, v);
    }
    char buf[64];
    if (ts) {
        std::snprintf(buf, sizeof buf, "%.17g", *ts);
        cfg.set("ts", buf);
    }
    if (horizon) {
        std::snprintf(buf, sizeof buf, "%.17g", *horizon);
        cfg.set("horizon", buf);
    }
    return scenario_from_config(cfg);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImcError("cannot write '" + path.string() + "'");
    out << content;
}

std::string metrics_text(const RunResult& res) {
    std::ostringstream os;
    os.precision(12);
    os << "contour_rms_um = " << res.metrics.rms_um << "\n";
    os << "contour_max_um = " << res.metrics.max_um << "\n";
    os << "settling_index = " << res.metrics.settling_index << "\n";
    for (std::size_t s = 0; s < res.slave_e2_rms.size(); ++s)
        os << "axial_e2_rms_mm_a" << (s + 2) << " = " << res.slave_e2_rms[s] << "\n";
    return os.str();
}

int run_one(const Scenario& sc, const fs::path& out_dir, std::string* error) {
    try {
        const RunResult res = run_closed_loop(sc);
        fs::create_directories(out_dir);
        std::ostringstream csv;
        write_csv(res.trace, csv);
        write_file(out_dir / (sc.name + "_trace.csv"), csv.str());
        write_file(out_dir / (sc.name + "_metrics.txt"), metrics_text(res));
        write_file(out_dir / (sc.name + "_synthesis.txt"), res.synthesis.text());
        return kExitOk;
    } catch (const SynthesisFailure& e) {
        if (error) *error = e.what();
        return kExitSynthesisFailure;
    } catch (const AssumptionFailure& e) {
        if (error) *error = e.what();
        return kExitAssumptionFailure;
    }
}

int thread_budget() {
    const char* env = std::getenv("CONTOUR_IMC_THREADS");
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (env) {
        const long v = std::atol(env);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return static_cast<int>(hw);
}

} // namespace

int cmd_run(const RunOptions& opts) {
    Scenario sc;
    try {
        sc = scenario_from_options(opts.scenario, opts.config_path, opts.sets, opts.ts,
                                   opts.horizon);
    } catch (const ImcError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::string error;
    const int code = run_one(sc, opts.out_dir, &error);
    if (code == kExitOk) {
        std::cout << "run " << sc.name << ": ok\n";
    } else {
        std::cerr << "run " << sc.name << ": " << error << "\n";
    }
    return code;
}

int cmd_compare(const CompareOptions& opts) {
    if (opts.scenarios.empty() || opts.controllers.empty()) {
        std::cerr << "config error: compare needs at least one scenario and one controller\n";
        return kExitConfigError;
    }
    struct Cell {
        int code = kExitOk;
        ContourMetrics metrics;
        std::string error;
    };
    std::vector<Scenario> scenarios;
    try {
        for (const auto& name : opts.scenarios)
            for (const auto& ctl : opts.controllers) {
                std::vector<std::string> sets = opts.sets;
                sets.push_back("slave_controller=" + ctl);
                scenarios.push_back(
                    scenario_from_options(name, "", sets, opts.ts, opts.horizon));
            }
    } catch (const ImcError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::vector<Cell> cells(scenarios.size());
    const int workers = std::min<int>(thread_budget(), static_cast<int>(scenarios.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            try {
                const RunResult res = run_closed_loop(scenarios[i]);
                cells[i].metrics = res.metrics;
            } catch (const SynthesisFailure& e) {
                cells[i].code = kExitSynthesisFailure;
                cells[i].error = e.what();
            } catch (const AssumptionFailure& e) {
                cells[i].code = kExitAssumptionFailure;
                cells[i].error = e.what();
            }
        }
    };
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    for (const auto& c : cells)
        if (c.code != kExitOk) {
            std::cerr << "compare: " << c.error << "\n";
            return c.code;
        }

    std::ostringstream csv, txt;
    csv << "scenario,controller,rms_um,max_um\n";
    char buf[64];
    const std::size_t nc = opts.controllers.size();
    txt << "contour error RMS / max (um)\n";
    for (std::size_t si = 0; si < opts.scenarios.size(); ++si) {
        txt << opts.scenarios[si] << ":\n";
        for (std::size_t ci = 0; ci < nc; ++ci) {
            const Cell& c = cells[si * nc + ci];
            std::snprintf(buf, sizeof buf, "%.6g", c.metrics.rms_um);
            csv << opts.scenarios[si] << ',' << opts.controllers[ci] << ',' << buf << ',';
            txt << "  " << opts.controllers[ci] << ": rms = " << buf;
            std::snprintf(buf, sizeof buf, "%.6g", c.metrics.max_um);
            csv << buf << "\n";
            txt << " , max = " << buf << "\n";
        }
    }
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "compare.csv", csv.str());
    write_file(fs::path(opts.out_dir) / "compare.txt", txt.str());
    std::cout << txt.str();
    return kExitOk;
}

int cmd_report(const ReportOptions& opts) {
    if (opts.trace_files.empty()) {
        std::cerr << "config error: report needs at least one trace file\n";
        return kExitConfigError;
    }
    if (opts.downsample < 1) {
        std::cerr << "config error: downsample factor must be >= 1\n";
        return kExitConfigError;
    }
    for (const auto& file : opts.trace_files) {
        std::ifstream in(file);
        if (!in) {
            std::cerr << "report: cannot open '" << file << "'\n";
            return kExitConfigError;
        }
        SimulationTrace tr;
        try {
            tr = read_csv(in);
        } catch (const ParseError& e) {
            std::cerr << "report: " << e.what() << "\n";
            return kExitConfigError;
        }
        const fs::path stem = fs::path(file).stem();
        fs::create_directories(opts.out_dir);
        std::ostringstream path_csv, err_csv;
        path_csv << "x,y\n";
        err_csv << "t,contour_error\n";
        char buf[64];
        for (long k = 0; k < tr.rows(); k += opts.downsample) {
            std::snprintf(buf, sizeof buf, "%.17g", tr.x1[k]);
            path_csv << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", tr.slaves[0].y2[k]);
            path_csv << buf << '\n';
            std::snprintf(buf, sizeof buf, "%.17g", tr.t[k]);
            err_csv << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", tr.contour_error[k]);
            err_csv << buf << '\n';
        }
        write_file(fs::path(opts.out_dir) / (stem.string() + "_path.csv"), path_csv.str());
        write_file(fs::path(opts.out_dir) / (stem.string() + "_error.csv"), err_csv.str());
    }
    return kExitOk;
}

} // namespace imc
