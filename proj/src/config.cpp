#include "crnstab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crnstab/io.hpp"

namespace crnstab {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
        if (!allowed.contains(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in '" + where + "'");
}

std::pair<std::int64_t, std::int64_t> parse_p(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        const auto slash = s.find('/');
        if (slash == std::string::npos)
            throw ConfigError("params.p: fraction string must look like \"1/30\"");
        try {
            const std::int64_t num = std::stoll(s.substr(0, slash));
            const std::int64_t den = std::stoll(s.substr(slash + 1));
            return {num, den};
        } catch (const std::exception&) {
            throw ConfigError("params.p: cannot parse fraction '" + s + "'");
        }
    }
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!(v > 0.0) || !(v < 1.0)) throw ConfigError("params.p must lie in (0,1)");
        return rationalize(v);
    }
    throw ConfigError("params.p must be a number or a fraction string");
}

PartitionParams parse_params(const json& j) {
    require_keys(j, "params", {"p", "eta0", "eta1", "beta"});
    PartitionParams params;
    if (j.contains("p")) std::tie(params.p_num, params.p_den) = parse_p(j.at("p"));
    params.eta0 = j.value("eta0", params.eta0);
    params.eta1 = j.value("eta1", params.eta1);
    params.beta = j.value("beta", params.beta);
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return params;
}

LatticeState parse_state(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(where + " must be an integer pair [x1, x2]");
    LatticeState x{j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
    if (x.x1 < 0 || x.x2 < 0) throw ConfigError(where + " must be nonnegative");
    return x;
}

SimulateConfig parse_simulate(const json& j) {
    require_keys(j, "simulate", {"chain", "x0", "stops", "max_recorded_events"});
    SimulateConfig cfg;
    if (j.contains("chain")) {
        try {
            cfg.chain = chain_from_string(j.at("chain").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("x0")) cfg.x0 = parse_state(j.at("x0"), "simulate.x0");
    if (cfg.chain == ChainKind::Z && (cfg.x0.x1 <= 2 || cfg.x0.x2 <= 2))
        throw ConfigError(SmallStateError(cfg.x0).what());
    if (j.contains("stops")) {
        cfg.stops.clear();
        for (const auto& s : j.at("stops")) {
            require_keys(s, "simulate.stops[]", {"kind", "value"});
            StopRule rule;
            try {
                rule.kind = stop_kind_from_string(s.at("kind").get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            rule.value = s.value("value", 0.0);
            cfg.stops.push_back(rule);
        }
    }
    bool bounded = false;
    for (const auto& rule : cfg.stops)
        if (rule.kind == StopKind::Time || rule.kind == StopKind::Events) bounded = true;
    if (!bounded)
        throw ConfigError("simulate.stops must include a 'time' or 'events' budget");
    cfg.max_recorded_events = j.value("max_recorded_events", cfg.max_recorded_events);
    return cfg;
}

VerifyConfig parse_verify(const json& j) {
    require_keys(j, "verify",
                 {"region", "r_lo", "r_hi", "gamma", "beta_sweep", "interface", "interface_r_lo",
                  "interface_r_hi", "max_recorded"});
    VerifyConfig cfg;
    if (j.contains("region")) {
        try {
            cfg.region = scan_region_from_string(j.at("region").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    cfg.r_lo = j.value("r_lo", cfg.r_lo);
    cfg.r_hi = j.value("r_hi", cfg.r_hi);
    cfg.gamma = j.value("gamma", cfg.gamma);
    if (!(cfg.gamma > 0.0)) throw ConfigError("verify.gamma must be > 0");
    if (cfg.r_lo < 0) throw ConfigError("verify.r_lo must be >= 0");
    if (j.contains("beta_sweep")) cfg.beta_sweep = j.at("beta_sweep").get<std::vector<double>>();
    for (double b : cfg.beta_sweep)
        if (!(b > 0.0)) throw ConfigError("verify.beta_sweep entries must be > 0");
    cfg.interface = j.value("interface", cfg.interface);
    cfg.interface_r_lo = j.value("interface_r_lo", cfg.interface_r_lo);
    cfg.interface_r_hi = j.value("interface_r_hi", cfg.interface_r_hi);
    cfg.max_recorded = j.value("max_recorded", cfg.max_recorded);
    return cfg;
}

OdeConfig parse_ode(const json& j) {
    require_keys(j, "ode",
                 {"x0", "T", "rtol", "magnitude_cap", "grid", "flow_grid", "flow_min", "flow_max",
                  "flow_n"});
    OdeConfig cfg;
    if (j.contains("x0")) {
        const auto& a = j.at("x0");
        if (!a.is_array() || a.size() != 2) throw ConfigError("ode.x0 must be a pair");
        cfg.x0 = {a[0].get<double>(), a[1].get<double>()};
        if (cfg.x0.x1 < 0.0 || cfg.x0.x2 < 0.0) throw ConfigError("ode.x0 must be nonnegative");
    }
    cfg.T = j.value("T", cfg.T);
    if (!(cfg.T > 0.0)) throw ConfigError("ode.T must be > 0");
    cfg.rtol = j.value("rtol", cfg.rtol);
    if (!(cfg.rtol > 1e-12) || !(cfg.rtol < 1e-3))
        throw ConfigError("ode.rtol must lie in (1e-12, 1e-3)");
    cfg.magnitude_cap = j.value("magnitude_cap", cfg.magnitude_cap);
    if (!(cfg.magnitude_cap >= 1e6)) throw ConfigError("ode.magnitude_cap must be >= 1e6");
    if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<double>>();
    cfg.flow_grid = j.value("flow_grid", cfg.flow_grid);
    cfg.flow_min = j.value("flow_min", cfg.flow_min);
    cfg.flow_max = j.value("flow_max", cfg.flow_max);
    cfg.flow_n = j.value("flow_n", cfg.flow_n);
    if (cfg.flow_grid && (cfg.flow_n < 2 || !(cfg.flow_max > cfg.flow_min)))
        throw ConfigError("ode.flow grid needs flow_n >= 2 and flow_max > flow_min");
    return cfg;
}

ScalingOptions parse_scaling(const json& j) {
    require_keys(j, "scaling",
                 {"N", "d_N", "T", "replicas", "eta1", "checkpoints", "tau_time_cap", "tau_mc_dt"});
    ScalingOptions cfg;
    cfg.N = j.value("N", cfg.N);
    cfg.d_N = j.value("d_N", cfg.d_N);
    cfg.T = j.value("T", cfg.T);
    cfg.replicas = j.value("replicas", cfg.replicas);
    cfg.eta1 = j.value("eta1", cfg.eta1);
    if (j.contains("checkpoints")) cfg.checkpoints = j.at("checkpoints").get<std::vector<double>>();
    cfg.tau_time_cap = j.value("tau_time_cap", cfg.tau_time_cap);
    cfg.tau_mc_dt = j.value("tau_mc_dt", cfg.tau_mc_dt);
    if (cfg.replicas < 1) throw ConfigError("scaling.replicas must be >= 1");
    if (!(cfg.T > 0.0)) throw ConfigError("scaling.T must be > 0");
    if (cfg.tau_time_cap < cfg.T) throw ConfigError("scaling.tau_time_cap must be >= T");
    try {
        from_axial({cfg.N, cfg.d_N});
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("scaling.(N, d_N): ") + e.what());
    }
    for (double c : cfg.checkpoints)
        if (!(c >= 0.0) || c > cfg.T) throw ConfigError("scaling.checkpoints must lie in [0, T]");
    return cfg;
}

CoupleConfig parse_couple(const json& j) {
    require_keys(j, "couple", {"N", "T", "replicas"});
    CoupleConfig cfg;
    cfg.N = j.value("N", cfg.N);
    cfg.T = j.value("T", cfg.T);
    cfg.replicas = j.value("replicas", cfg.replicas);
    if (cfg.N < 8) throw ConfigError("couple.N must be >= 8 (both coordinates above 2)");
    if (!(cfg.T > 0.0)) throw ConfigError("couple.T must be > 0");
    if (cfg.replicas < 1) throw ConfigError("couple.replicas must be >= 1");
    return cfg;
}

OuConfig parse_ou(const json& j) {
    require_keys(j, "ou",
                 {"d0", "eta1", "replicas", "dt", "max_time", "bridge_correction",
                  "survival_grid"});
    OuConfig cfg;
    cfg.options.d0 = j.value("d0", cfg.options.d0);
    cfg.options.eta1 = j.value("eta1", cfg.options.eta1);
    cfg.options.replicas = j.value("replicas", cfg.options.replicas);
    cfg.options.dt = j.value("dt", cfg.options.dt);
    cfg.options.max_time = j.value("max_time", cfg.options.max_time);
    cfg.options.bridge_correction = j.value("bridge_correction", cfg.options.bridge_correction);
    if (!(std::abs(cfg.options.d0) < cfg.options.eta1))
        throw ConfigError("ou: need |d0| < eta1");
    if (!(cfg.options.dt > 0.0) || cfg.options.dt > 1e-3)
        throw ConfigError("ou.dt must lie in (0, 1e-3]");
    if (cfg.options.replicas < 1) throw ConfigError("ou.replicas must be >= 1");
    if (!(cfg.options.max_time > 0.0)) throw ConfigError("ou.max_time must be > 0");
    if (j.contains("survival_grid"))
        cfg.survival_grid = j.at("survival_grid").get<std::vector<double>>();
    else
        for (double s = 0.5; s <= 4.0 + 1e-12; s += 0.25) cfg.survival_grid.push_back(s);
    for (double s : cfg.survival_grid)
        if (!(s > 0.0)) throw ConfigError("ou.survival_grid entries must be > 0");
    return cfg;
}

ExcursionsConfig parse_excursions(const json& j) {
    require_keys(j, "excursions", {"x0", "lo", "hi", "event_budget", "time_budget"});
    ExcursionsConfig cfg;
    if (j.contains("x0")) cfg.x0 = parse_state(j.at("x0"), "excursions.x0");
    cfg.lo = j.value("lo", cfg.lo);
    cfg.hi = j.value("hi", cfg.hi);
    cfg.event_budget = j.value("event_budget", cfg.event_budget);
    cfg.time_budget = j.value("time_budget", cfg.time_budget);
    if (!(cfg.lo < cfg.hi)) throw ConfigError("excursions: need lo < hi");
    if (cfg.event_budget == 0) throw ConfigError("excursions.event_budget must be >= 1");
    if (!(cfg.time_budget > 0.0)) throw ConfigError("excursions.time_budget must be > 0");
    return cfg;
}

json dump_params(const PartitionParams& p) {
    return json{{"p", std::to_string(p.p_num) + "/" + std::to_string(p.p_den)},
                {"eta0", p.eta0},
                {"eta1", p.eta1},
                {"beta", p.beta}};
}

json dump_stops(const std::vector<StopRule>& stops) {
    json out = json::array();
    for (const auto& s : stops) out.push_back({{"kind", to_string(s.kind)}, {"value", s.value}});
    return out;
}

json dump_config(const Config& cfg) {
    json j;
    j["params"] = dump_params(cfg.params);
    j["rate_constants"] = cfg.rate_constants;
    j["seed"] = cfg.seed;
    if (cfg.simulate) {
        const auto& c = *cfg.simulate;
        j["simulate"] = {{"chain", to_string(c.chain)},
                         {"x0", {c.x0.x1, c.x0.x2}},
                         {"stops", dump_stops(c.stops)},
                         {"max_recorded_events", c.max_recorded_events}};
    }
    if (cfg.verify) {
        const auto& c = *cfg.verify;
        j["verify"] = {{"region", to_string(c.region)},
                       {"r_lo", c.r_lo},
                       {"r_hi", c.r_hi},
                       {"gamma", c.gamma},
                       {"beta_sweep", c.beta_sweep},
                       {"interface", c.interface},
                       {"interface_r_lo", c.interface_r_lo},
                       {"interface_r_hi", c.interface_r_hi},
                       {"max_recorded", c.max_recorded}};
    }
    if (cfg.ode) {
        const auto& c = *cfg.ode;
        j["ode"] = {{"x0", {c.x0.x1, c.x0.x2}},
                    {"T", c.T},
                    {"rtol", c.rtol},
                    {"magnitude_cap", c.magnitude_cap},
                    {"grid", c.grid},
                    {"flow_grid", c.flow_grid},
                    {"flow_min", c.flow_min},
                    {"flow_max", c.flow_max},
                    {"flow_n", c.flow_n}};
    }
    if (cfg.scaling) {
        const auto& c = *cfg.scaling;
        j["scaling"] = {{"N", c.N},
                        {"d_N", c.d_N},
                        {"T", c.T},
                        {"replicas", c.replicas},
                        {"eta1", c.eta1},
                        {"checkpoints", c.checkpoints},
                        {"tau_time_cap", c.tau_time_cap},
                        {"tau_mc_dt", c.tau_mc_dt}};
    }
    if (cfg.couple) {
        const auto& c = *cfg.couple;
        j["couple"] = {{"N", c.N}, {"T", c.T}, {"replicas", c.replicas}};
    }
    if (cfg.ou) {
        const auto& c = *cfg.ou;
        j["ou"] = {{"d0", c.options.d0},
                   {"eta1", c.options.eta1},
                   {"replicas", c.options.replicas},
                   {"dt", c.options.dt},
                   {"max_time", c.options.max_time},
                   {"bridge_correction", c.options.bridge_correction},
                   {"survival_grid", c.survival_grid}};
    }
    if (cfg.excursions) {
        const auto& c = *cfg.excursions;
        j["excursions"] = {{"x0", {c.x0.x1, c.x0.x2}},
                           {"lo", c.lo},
                           {"hi", c.hi},
                           {"event_budget", c.event_budget},
                           {"time_budget", c.time_budget}};
    }
    return j;
}

}  // namespace

void refresh_resolved(Config& config) {
    config.resolved = dump_config(config).dump(2);
    config.hash = to_hex(fnv1a64(config.resolved));
}

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    require_keys(j, "config",
                 {"params", "rate_constants", "seed", "simulate", "verify", "ode", "scaling",
                  "couple", "ou", "excursions"});

    Config cfg;
    try {
        if (j.contains("params")) cfg.params = parse_params(j.at("params"));
        if (j.contains("rate_constants")) {
            const auto v = j.at("rate_constants").get<std::vector<double>>();
            if (v.size() != 5)
                throw ConfigError("rate_constants must have exactly 5 entries");
            for (std::size_t i = 0; i < 5; ++i) {
                if (!(v[i] >= 0.0)) throw ConfigError("rate_constants must be nonnegative");
                cfg.rate_constants[i] = v[i];
            }
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("simulate")) cfg.simulate = parse_simulate(j.at("simulate"));
        if (j.contains("verify")) cfg.verify = parse_verify(j.at("verify"));
        if (j.contains("ode")) cfg.ode = parse_ode(j.at("ode"));
        if (j.contains("scaling")) cfg.scaling = parse_scaling(j.at("scaling"));
        if (j.contains("couple")) cfg.couple = parse_couple(j.at("couple"));
        if (j.contains("ou")) cfg.ou = parse_ou(j.at("ou"));
        if (j.contains("excursions")) cfg.excursions = parse_excursions(j.at("excursions"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    refresh_resolved(cfg);
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

Config default_config() {
    Config cfg;
    refresh_resolved(cfg);
    return cfg;
}

}  // namespace crnstab
