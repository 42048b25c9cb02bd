#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace imc {

/// Per-tick closed-loop record. Column order in CSV is fixed:
/// k,t,x1_ref,x1,(r2,y2,e2,u2,u_im,u_st per slave),contour_error.
/// Single-slave traces use the plain names; multi-slave traces suffix each
/// group with _a<axis>, axes numbered from 2.
struct SimulationTrace {
    struct SlaveSeries {
        std::vector<double> r2, y2, e2, u2, u_im, u_st;
    };

    std::vector<double> t, x1_ref, x1;
    std::vector<SlaveSeries> slaves;
    std::vector<double> contour_error;
    std::vector<char> metrics_mask;  ///< 1 = row participates in metrics

    std::uint64_t scenario_hash = 0;
    double solver_margin = 0;
    double Ts = 0;

    long rows() const { return static_cast<long>(t.size()); }
    int n_slaves() const { return static_cast<int>(slaves.size()); }
    std::vector<std::string> column_names() const;
};

void write_csv(const SimulationTrace& trace, std::ostream& os);

/// Parses a trace CSV produced by write_csv (metrics mask not round-tripped).
SimulationTrace read_csv(std::istream& is);

struct ContourMetrics {
    double rms_um = 0;
    double max_um = 0;
    long settling_index = -1;  ///< first k after which |error| stays below threshold
};

/// Metrics over masked rows; trace units are mm, metrics are reported in um.
ContourMetrics compute_metrics(const SimulationTrace& trace, double settle_threshold_mm);

} // namespace imc
