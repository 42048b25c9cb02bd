#include "imc/trace.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "imc/errors.hpp"

namespace imc {

std::vector<std::string> SimulationTrace::column_names() const {
    std::vector<std::string> names = {"k", "t", "x1_ref", "x1"};
    const char* group[] = {"r2", "y2", "e2", "u2", "u_im", "u_st"};
    if (n_slaves() == 1) {
        for (const char* g : group) names.emplace_back(g);
    } else {
        for (int s = 0; s < n_slaves(); ++s)
            for (const char* g : group)
                names.push_back(std::string(g) + "_a" + std::to_string(s + 2));
    }
    names.emplace_back("contour_error");
    return names;
}

void write_csv(const SimulationTrace& trace, std::ostream& os) {
    const auto names = trace.column_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        os << names[i] << (i + 1 == names.size() ? "\n" : ",");
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (long k = 0; k < trace.rows(); ++k) {
        os << k << ',';
        emit(trace.t[k]); os << ',';
        emit(trace.x1_ref[k]); os << ',';
        emit(trace.x1[k]); os << ',';
        for (const auto& s : trace.slaves) {
            emit(s.r2[k]); os << ',';
            emit(s.y2[k]); os << ',';
            emit(s.e2[k]); os << ',';
            emit(s.u2[k]); os << ',';
            emit(s.u_im[k]); os << ',';
            emit(s.u_st[k]); os << ',';
        }
        emit(trace.contour_error[k]);
        os << '\n';
    }
}

SimulationTrace read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ParseError("trace csv: empty input");
    long ncols = 1;
    for (char ch : header)
        if (ch == ',') ++ncols;
    if (ncols < 5 || (ncols - 5) % 6 != 0)
        throw ParseError("trace csv: unexpected column count");
    SimulationTrace tr;
    tr.slaves.resize((ncols - 5) / 6);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        vals.reserve(ncols);
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<long>(vals.size()) != ncols) throw ParseError("trace csv: ragged row");
        std::size_t i = 1;
        tr.t.push_back(vals[i++]);
        tr.x1_ref.push_back(vals[i++]);
        tr.x1.push_back(vals[i++]);
        for (auto& s : tr.slaves) {
            s.r2.push_back(vals[i++]);
            s.y2.push_back(vals[i++]);
            s.e2.push_back(vals[i++]);
            s.u2.push_back(vals[i++]);
            s.u_im.push_back(vals[i++]);
            s.u_st.push_back(vals[i++]);
        }
        tr.contour_error.push_back(vals[i]);
    }
    tr.metrics_mask.assign(tr.t.size(), 1);
    if (tr.t.size() >= 2) tr.Ts = tr.t[1] - tr.t[0];
    return tr;
}

ContourMetrics compute_metrics(const SimulationTrace& trace, double settle_threshold_mm) {
    ContourMetrics m;
    double sumsq = 0;
    long count = 0;
    for (long k = 0; k < trace.rows(); ++k) {
        if (!trace.metrics_mask.empty() && !trace.metrics_mask[k]) continue;
        const double e = trace.contour_error[k];
        sumsq += e * e;
        m.max_um = std::max(m.max_um, std::fabs(e));
        ++count;
    }
    m.rms_um = count ? std::sqrt(sumsq / count) : 0;
    m.rms_um *= 1e3;  // mm -> um
    m.max_um *= 1e3;
    m.settling_index = -1;
    for (long k = trace.rows() - 1; k >= 0; --k) {
        if (!trace.metrics_mask.empty() && !trace.metrics_mask[k]) continue;
        if (std::fabs(trace.contour_error[k]) >= settle_threshold_mm) break;
        m.settling_index = k;
    }
    return m;
}

} // namespace imc
