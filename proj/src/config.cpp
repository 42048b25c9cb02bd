#include "imc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "imc/errors.hpp"

namespace imc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        throw ConfigError("value for '" + key + "' is not a number: '" + v + "'");
    return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("value for '" + key + "' must be a [..] list");
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        out.push_back(parse_number(key, cell));
    }
    return out;
}

void set_plant(const std::string& key, PlantDT& plant, const std::string& field,
               const std::string& value, double Ts) {
    const std::vector<double> nums = parse_list(key, value);
    if (field == "G") {
        const int n = static_cast<int>(std::lround(std::sqrt(double(nums.size()))));
        if (n * n != static_cast<int>(nums.size()) || n == 0)
            throw ConfigError("'" + key + "': G must be a square row-major list");
        plant.G2.resize(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) plant.G2(r, c) = nums[r * n + c];
    } else if (field == "H") {
        plant.H2 = Eigen::Map<const Vec>(nums.data(), nums.size());
    } else if (field == "C") {
        plant.C2 = Eigen::Map<const RowVec>(nums.data(), nums.size());
    } else {
        throw ConfigError("unknown plant field in '" + key + "'");
    }
    plant.Ts = Ts;
}

SlaveFnSpec::Type fn_type_from_string(const std::string& key, const std::string& v) {
    if (v == "sine") return SlaveFnSpec::Type::sine;
    if (v == "cosine") return SlaveFnSpec::Type::cosine;
    if (v == "heart_power") return SlaveFnSpec::Type::heart_power;
    if (v == "zero") return SlaveFnSpec::Type::zero;
    if (v == "linear") return SlaveFnSpec::Type::linear;
    throw ConfigError("'" + key + "': unknown slave fn type '" + v + "'");
}

// slave index from key prefix: "slave"/"slave2" -> 0, "slave3" -> 1, ...
int slave_index(const std::string& prefix) {
    if (prefix == "slave" || prefix == "slave2") return 0;
    if (prefix.size() > 5) {
        const int axis = std::atoi(prefix.c_str() + 5);
        if (axis >= 2 && axis <= 9) return axis - 2;
    }
    return -1;
}

void apply_one(Scenario& sc, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_number(key, value); };

    if (key == "ts") { sc.Ts = num(); return; }
    if (key == "horizon") { sc.horizon = num(); return; }
    if (key == "seed") { sc.seed = static_cast<std::uint64_t>(num()); return; }
    if (key == "slave_controller") { sc.slave_controller = controller_from_string(value); return; }
    if (key == "master_mode") {
        if (value == "prescribed") sc.master_mode = MasterMode::prescribed;
        else if (value == "tracked") sc.master_mode = MasterMode::tracked;
        else throw ConfigError("'master_mode' must be prescribed|tracked");
        return;
    }
    if (key == "kind") {
        if (value == "monotonic") sc.kind = ContourKind::monotonic;
        else if (value == "rotational") sc.kind = ContourKind::rotational;
        else throw ConfigError("'kind' must be monotonic|rotational");
        return;
    }
    if (key == "composition") {
        if (value == "xy") sc.composition = CompositionType::master_slave_xy;
        else if (value == "four_axis") sc.composition = CompositionType::four_axis_xy;
        else throw ConfigError("'composition' must be xy|four_axis");
        return;
    }
    if (key == "gains.kp") { sc.gains.pid.Kp = num(); return; }
    if (key == "gains.ki") { sc.gains.pid.Ki = num(); return; }
    if (key == "gains.kd") { sc.gains.pid.Kd = num(); return; }
    if (key == "gains.kx") { sc.gains.ccc.Kx = num(); return; }
    if (key == "gains.ky") { sc.gains.ccc.Ky = num(); return; }
    if (key == "stabilizer.grid_n") {
        sc.stab.grid_N = static_cast<int>(num());
        if (sc.stab.grid_N < 2) throw ConfigError("'stabilizer.grid_n' must be >= 2");
        return;
    }
    if (key == "stabilizer.grid_margin") { sc.stab.grid_margin = num(); return; }
    if (key == "stabilizer.observer_radius") { sc.stab.observer_radius = num(); return; }
    if (key == "stabilizer.decay") { sc.stab.decay = num(); return; }
    if (key == "stabilizer.margin_tau") { sc.stab.margin_tau = num(); return; }
    if (key == "stabilizer.box") { sc.stab.box = num(); return; }
    if (key == "stabilizer.placed_root") { sc.stab.placed_root = num(); return; }
    if (key == "metrics.coscut") { sc.metrics_coscut = num(); return; }
    if (key == "metrics.settle_threshold") { sc.settle_threshold = num(); return; }
    if (key == "master.type") {
        if (value == "ramp_sine") sc.master.type = MasterSpec::Type::ramp_sine;
        else if (value == "cosine") sc.master.type = MasterSpec::Type::cosine;
        else throw ConfigError("'master.type' must be ramp_sine|cosine");
        return;
    }
    if (key == "master.c0") { sc.master.c0 = num(); return; }
    if (key == "master.c1") { sc.master.c1 = num(); return; }
    if (key == "master.c2") { sc.master.c2 = num(); return; }
    if (key == "master.c3") { sc.master.c3 = num(); return; }
    if (key == "master.R") { sc.master.R = num(); return; }
    if (key == "master.w") { sc.master.w = num(); return; }
    if (key == "master.phi0") { sc.master.phi0 = num(); return; }
    if (key.rfind("master.plant.", 0) == 0) {
        set_plant(key, sc.master_plant, key.substr(13), value, sc.Ts);
        return;
    }

    // slave keys: slave[.N].fn.{type,a,b,c} and slave.plant.{G,H,C}
    const auto dot = key.find('.');
    if (dot != std::string::npos && key.rfind("slave", 0) == 0) {
        const std::string prefix = key.substr(0, dot);
        const int idx = slave_index(prefix);
        const std::string rest = key.substr(dot + 1);
        if (idx >= 0 && rest.rfind("fn.", 0) == 0) {
            while (static_cast<int>(sc.slave_fns.size()) <= idx) sc.slave_fns.push_back({});
            SlaveFnSpec& fn = sc.slave_fns[idx];
            const std::string field = rest.substr(3);
            if (field == "type") fn.type = fn_type_from_string(key, value);
            else if (field == "a") fn.a = num();
            else if (field == "b") fn.b = num();
            else if (field == "c") fn.c = num();
            else throw ConfigError("unknown key '" + key + "'");
            return;
        }
        if (prefix == "slave" && rest.rfind("plant.", 0) == 0) {
            set_plant(key, sc.slave_plant, rest.substr(6), value, sc.Ts);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::stringstream ss(text);
    std::string line;
    long lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config line " + std::to_string(lineno) + ": empty key or value");
        cfg.set(key, value);
    }
    return cfg;
}

std::pair<std::string, std::string> parse_set_expr(const std::string& expr) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == expr.size())
        throw ConfigError("--set expects key=value, got '" + expr + "'");
    return {expr.substr(0, eq), expr.substr(eq + 1)};
}

Scenario scenario_from_config(const ConfigMap& cfg) {
    std::string name = "custom";
    for (const auto& [k, v] : cfg.entries)
        if (k == "scenario") name = v;
    Scenario sc;
    if (name == "custom") {
        auto [master, slave] = paper_plants();
        sc.master_plant = master;
        sc.slave_plant = slave;
        sc.slave_fns.clear();
    } else {
        sc = builtin_scenario(name);  // throws ConfigError for unknown names
    }
    apply_overrides(sc, cfg);
    if (sc.slave_fns.empty())
        throw ConfigError("scenario has no slave axes; set slave.fn.type");
    return sc;
}

void apply_overrides(Scenario& sc, const ConfigMap& cfg) {
    for (const auto& [k, v] : cfg.entries) {
        if (k == "scenario") continue;
        apply_one(sc, k, v);
    }
}

} // namespace imc
