#pragma once

#include <optional>
#include <string>
#include <vector>

namespace imc {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSynthesisFailure = 2;
inline constexpr int kExitAssumptionFailure = 3;

struct RunOptions {
    std::string scenario;             ///< builtin name; empty when config-only
    std::string config_path;
    std::vector<std::string> sets;    ///< key=value overrides
    std::string out_dir = ".";
    std::optional<double> ts;
    std::optional<double> horizon;
};

struct CompareOptions {
    std::vector<std::string> scenarios;
    std::vector<std::string> controllers;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    std::optional<double> ts;
    std::optional<double> horizon;
};

struct ReportOptions {
    std::vector<std::string> trace_files;
    std::string out_dir = ".";
    long downsample = 1;
};

int cmd_run(const RunOptions& opts);
int cmd_compare(const CompareOptions& opts);
int cmd_report(const ReportOptions& opts);

} // namespace imc
