#include "crnstab/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "crnstab/io.hpp"
#include "crnstab/stats.hpp"

namespace crnstab {

using nlohmann::json;

namespace {

std::filesystem::path out_path(const CommandOptions& options, const std::string& name) {
    std::filesystem::create_directories(options.out_dir);
    return std::filesystem::path(options.out_dir) / name;
}

std::ofstream open_csv(const CommandOptions& options, const std::string& name,
                       const Config& config, const std::string& header) {
    std::ofstream out(out_path(options, name), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + name + " in " + options.out_dir);
    out << "# config_hash=" << config.hash << "\n" << header << "\n";
    return out;
}

void write_json(const CommandOptions& options, const std::string& name, json j,
                const Config& config) {
    j["config_hash"] = config.hash;
    j["config"] = json::parse(config.resolved);
    write_text_file(out_path(options, name).string(), j.dump(2) + "\n");
}

void warn_analysis_gaps(const PartitionParams& params) {
    for (const auto& gap : params.analysis_condition_gaps())
        std::cerr << "warning: " << gap << "\n";
}

void run_replicas(int replicas, int jobs, const std::function<void(int)>& body) {
    const int n_jobs = std::max(1, jobs);
    if (n_jobs == 1) {
        for (int i = 0; i < replicas; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    const int chunk = (replicas + n_jobs - 1) / n_jobs;
    for (int j = 0; j < n_jobs; ++j) {
        const int lo = j * chunk;
        const int hi = std::min(replicas, lo + chunk);
        if (lo < hi)
            threads.emplace_back([&, lo, hi] {
                for (int i = lo; i < hi; ++i) body(i);
            });
    }
    for (auto& t : threads) t.join();
}

json state_json(LatticeState x) { return json{x.x1, x.x2}; }

json drift_report_json(const DriftReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"x1", v.state.x1}, {"x2", v.state.x2}, {"drift", v.value}});
    json j{{"region", report.region},
           {"window", {{"r_lo", report.r_lo}, {"r_hi", report.r_hi}}},
           {"gamma", report.gamma},
           {"params",
            {{"p", std::to_string(report.params.partition.p_num) + "/" +
                       std::to_string(report.params.partition.p_den)},
             {"eta0", report.params.partition.eta0},
             {"eta1", report.params.partition.eta1},
             {"beta", report.params.partition.beta},
             {"c_S", report.params.c_s}}},
           {"points_scanned", report.points_scanned},
           {"violation_count", report.violation_count},
           {"max_violation_radius", report.max_violation_radius},
           {"violations", violations}};
    if (report.certified_min_radius)
        j["certified_min_radius"] = *report.certified_min_radius;
    else
        j["certified_min_radius"] = "none";
    return j;
}

json interface_report_json(const InterfaceReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"x1", v.state.x1},
                              {"x2", v.state.x2},
                              {"v_cone", v.cone_value},
                              {"v_side", v.side_value}});
    json j{{"window", {{"r_lo", report.r_lo}, {"r_hi", report.r_hi}}},
           {"points_scanned", report.points_scanned},
           {"violation_count", report.violation_count},
           {"max_violation_radius", report.max_violation_radius},
           {"violations", violations}};
    if (report.certified_min_radius)
        j["certified_min_radius"] = *report.certified_min_radius;
    else
        j["certified_min_radius"] = "none";
    return j;
}

}  // namespace

int cmd_simulate(Config config, const CommandOptions& options) {
    if (!config.simulate) config.simulate = SimulateConfig{};
    refresh_resolved(config);
    const SimulateConfig& cfg = *config.simulate;
    warn_analysis_gaps(config.params);

    const ReactionSystem system{cfg.chain, config.rate_constants};
    RngStream rng(config.seed, 0);

    auto csv = open_csv(options, "trajectory.csv", config, "t,x1,x2,reaction");
    csv << "0," << cfg.x0.x1 << "," << cfg.x0.x2 << ",-1\n";
    std::uint64_t recorded = 0;
    const auto outcome = ssa_run_observed(
        system, cfg.x0, cfg.stops, config.params, rng,
        [&](double t, LatticeState x, int reaction, double) {
            if (recorded < cfg.max_recorded_events) {
                csv << fmt_double(t) << "," << x.x1 << "," << x.x2 << "," << reaction << "\n";
                ++recorded;
            }
        });
    csv.close();

    write_json(options, "trajectory_meta.json",
               json{{"chain", to_string(cfg.chain)},
                    {"x0", state_json(cfg.x0)},
                    {"seed", config.seed},
                    {"stop_reason", outcome.stop_reason},
                    {"final_time", outcome.final_time},
                    {"final_state", state_json(outcome.final_state)},
                    {"events", outcome.events},
                    {"recorded_events", recorded}},
               config);

    std::cout << "simulate: chain " << to_string(cfg.chain) << " stopped by " << outcome.stop_reason
              << " at t=" << outcome.final_time << " after " << outcome.events << " events\n";
    return 0;
}

int cmd_verify(Config config, const CommandOptions& options) {
    if (!config.verify) config.verify = VerifyConfig{};
    refresh_resolved(config);
    const VerifyConfig& cfg = *config.verify;
    warn_analysis_gaps(config.params);

    const EnergyParams energy_params = EnergyParams::make(config.params);
    const DriftReport drift_report =
        verify_drift(cfg.region, cfg.r_lo, cfg.r_hi, cfg.gamma, energy_params, options.jobs,
                     cfg.max_recorded);

    json sweep = json::array();
    for (double beta : cfg.beta_sweep) {
        PartitionParams variant = config.params;
        variant.beta = beta;
        const auto report = verify_drift(cfg.region, cfg.r_lo, cfg.r_hi, cfg.gamma,
                                         EnergyParams::make(variant), options.jobs, 16);
        json entry{{"beta", beta},
                   {"certified", report.certified_min_radius.has_value()},
                   {"violation_count", report.violation_count}};
        if (report.certified_min_radius)
            entry["certified_min_radius"] = *report.certified_min_radius;
        sweep.push_back(entry);
    }

    json drift_json = drift_report_json(drift_report);
    if (!cfg.beta_sweep.empty()) drift_json["beta_sweep"] = sweep;
    write_json(options, "drift_report.json", drift_json, config);

    bool certified = drift_report.certified_min_radius.has_value();
    std::cout << "verify: drift scan '" << drift_report.region << "' on [" << cfg.r_lo << ", "
              << cfg.r_hi << "]: " << drift_report.violation_count << " violations";
    if (drift_report.certified_min_radius)
        std::cout << ", certified from radius " << *drift_report.certified_min_radius;
    std::cout << "\n";

    if (cfg.interface) {
        const InterfaceReport interface_report = verify_interface_ordering(
            cfg.interface_r_lo, cfg.interface_r_hi, energy_params, options.jobs, cfg.max_recorded);
        write_json(options, "interface_report.json", interface_report_json(interface_report),
                   config);
        std::cout << "verify: interface ordering on [" << cfg.interface_r_lo << ", "
                  << cfg.interface_r_hi << "]: " << interface_report.violation_count
                  << " violations";
        if (interface_report.certified_min_radius)
            std::cout << ", ordered from radius " << *interface_report.certified_min_radius;
        std::cout << "\n";
        certified = certified && interface_report.certified_min_radius.has_value();
    }

    if (!certified) {
        std::cerr << "verify: certification failed (violations reach the top of a window)\n";
        return 2;
    }
    return 0;
}

int cmd_ode(Config config, const CommandOptions& options) {
    if (!config.ode) config.ode = OdeConfig{};
    refresh_resolved(config);
    const OdeConfig& cfg = *config.ode;

    OdeOptions ode_options;
    ode_options.rtol = cfg.rtol;
    ode_options.magnitude_cap = cfg.magnitude_cap;
    ode_options.grid = cfg.grid;
    const OdeResult result = integrate(cfg.x0, cfg.T, ode_options);

    auto csv = open_csv(options, "path.csv", config, "t,x1,x2");
    for (const auto& [t, x] : result.path)
        csv << fmt_double(t) << "," << fmt_double(x.x1) << "," << fmt_double(x.x2) << "\n";
    csv.close();

    json equilibria_json = json::array();
    for (const auto& eq : equilibria())
        equilibria_json.push_back({{"value", eq.value},
                                   {"stable", eq.stable},
                                   {"eig_tangential", eq.eig_tangential},
                                   {"eig_transversal", eq.eig_transversal}});

    json j{{"verdict", to_string(result.verdict)},
           {"x0", {cfg.x0.x1, cfg.x0.x2}},
           {"final_time", result.final_time},
           {"final_state", {result.final_state.x1, result.final_state.x2}},
           {"steps_accepted", result.steps_accepted},
           {"steps_rejected", result.steps_rejected},
           {"equilibria", equilibria_json}};
    if (result.verdict == OdeVerdict::BlowUp) {
        j["blow_up"] = {{"time", result.blow_up_time}, {"error", result.blow_up_error}};
        if (cfg.x0.x1 == cfg.x0.x2) {
            const auto oracle = blow_up_time(cfg.x0.x1);
            j["blow_up"]["quadrature_time"] = oracle.value;
            j["blow_up"]["quadrature_error"] = oracle.error_bound;
        }
    }
    write_json(options, "ode_result.json", j, config);

    if (cfg.flow_grid) {
        auto flow = open_csv(options, "flow_field.csv", config, "x1,x2,v1,v2");
        const double step = (cfg.flow_max - cfg.flow_min) / (cfg.flow_n - 1);
        for (int i = 0; i < cfg.flow_n; ++i) {
            for (int k = 0; k < cfg.flow_n; ++k) {
                const Vec2 x{cfg.flow_min + step * i, cfg.flow_min + step * k};
                const Vec2 v = vector_field(x);
                flow << fmt_double(x.x1) << "," << fmt_double(x.x2) << "," << fmt_double(v.x1)
                     << "," << fmt_double(v.x2) << "\n";
            }
        }
    }

    std::cout << "ode: " << to_string(result.verdict) << " at t=" << result.final_time << "\n";
    return 0;
}

int cmd_scaling(Config config, const CommandOptions& options) {
    if (!config.scaling) config.scaling = ScalingOptions{};
    refresh_resolved(config);
    const ScalingOptions& cfg = *config.scaling;

    const ScalingReport report = scaling_experiment(cfg, RngLayout{config.seed, 0}, options.jobs);

    json checkpoints = json::array();
    for (const auto& c : report.checkpoints)
        checkpoints.push_back({{"t", c.t},
                               {"samples", c.samples},
                               {"mean", c.mean},
                               {"var", c.var},
                               {"ou_mean", c.ou_mean},
                               {"ou_var", c.ou_var}});
    write_json(options, "scaling_report.json",
               json{{"N", cfg.N},
                    {"d_N", cfg.d_N},
                    {"T", cfg.T},
                    {"replicas", cfg.replicas},
                    {"mean_sup_dev", report.mean_sup_dev},
                    {"checkpoints", checkpoints},
                    {"moment1_mean", report.moment1_mean},
                    {"moment1_target", report.moment1_target},
                    {"moment2_mean", report.moment2_mean},
                    {"moment2_target", report.moment2_target},
                    {"tau_samples", report.tau_y.size()},
                    {"tau_censored", report.tau_censored},
                    {"tau_ks_distance", report.tau_ks_distance}},
               config);

    auto csv = open_csv(options, "tau_samples.csv", config, "tau_y");
    for (double t : report.tau_y) csv << fmt_double(t) << "\n";

    std::cout << "scaling: N=" << cfg.N << " mean sup|R/N - e^t| = " << report.mean_sup_dev
              << "\n";
    return 0;
}

int cmd_couple(Config config, const CommandOptions& options) {
    if (!config.couple) config.couple = CoupleConfig{};
    refresh_resolved(config);
    const CoupleConfig& cfg = *config.couple;
    warn_analysis_gaps(config.params);

    const LatticeState x0 = from_axial({cfg.N, cfg.N % 2 == 0 ? 0 : 1});
    std::vector<double> distances(static_cast<std::size_t>(cfg.replicas));
    std::vector<int> tcn_stopped(static_cast<std::size_t>(cfg.replicas), 0);
    run_replicas(cfg.replicas, options.jobs, [&](int i) {
        RngStream rng(config.seed, static_cast<std::uint64_t>(i));
        const auto result = coupled_yz_run(x0, cfg.T, cfg.N, config.params, rng, false);
        distances[static_cast<std::size_t>(i)] = result.sup_distance;
        tcn_stopped[static_cast<std::size_t>(i)] = result.stop_reason == "tcn" ? 1 : 0;
    });

    MeanVar stat;
    double max_distance = 0.0;
    int tcn_count = 0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        stat.add(distances[i]);
        max_distance = std::max(max_distance, distances[i]);
        tcn_count += tcn_stopped[i];
    }
    const double p = config.params.p();
    const double gronwall =
        2.0 * (8.0 / (p * p) + 1.0) * cfg.T * std::exp(6.0 * cfg.T);

    auto csv = open_csv(options, "couple_distances.csv", config, "replica,sup_distance");
    for (std::size_t i = 0; i < distances.size(); ++i)
        csv << i << "," << fmt_double(distances[i]) << "\n";

    write_json(options, "couple_report.json",
               json{{"N", cfg.N},
                    {"T", cfg.T},
                    {"replicas", cfg.replicas},
                    {"x0", state_json(x0)},
                    {"mean_sup_distance", stat.mean()},
                    {"se_sup_distance", stat.se()},
                    {"max_sup_distance", max_distance},
                    {"gronwall_constant", gronwall},
                    {"tcn_stopped", tcn_count}},
               config);

    std::cout << "couple: N=" << cfg.N << " mean sup|Z-Y| = " << stat.mean()
              << " (Gronwall bound " << gronwall << ")\n";
    return 0;
}

int cmd_ou(Config config, const CommandOptions& options) {
    if (!config.ou) config.ou = OuConfig{};
    refresh_resolved(config);
    const OuConfig& cfg = *config.ou;

    const OuHittingResult result = ou_hitting_mc(cfg.options, RngLayout{config.seed, 0},
                                                 options.jobs);
    const double moment_bound = 2.0 + c_tau() * cfg.options.eta1;

    auto survival_csv = open_csv(options, "ou_survival.csv", config, "s,empirical,bound,mc_se");
    const double n = static_cast<double>(cfg.options.replicas);
    for (double s : cfg.survival_grid) {
        const double empirical = result.survival(s);
        const double se = std::sqrt(std::max(empirical * (1.0 - empirical), 0.0) / n);
        survival_csv << fmt_double(s) << "," << fmt_double(empirical) << ","
                     << fmt_double(hitting_tail_bound(s, cfg.options.eta1)) << ","
                     << fmt_double(se) << "\n";
    }
    survival_csv.close();

    auto tau_csv = open_csv(options, "ou_tau_samples.csv", config, "tau");
    for (double t : result.tau) tau_csv << fmt_double(t) << "\n";

    write_json(options, "ou_report.json",
               json{{"d0", cfg.options.d0},
                    {"eta1", cfg.options.eta1},
                    {"replicas", cfg.options.replicas},
                    {"dt", cfg.options.dt},
                    {"completed", result.tau.size()},
                    {"censored", result.censored},
                    {"bias_warning", result.bias_warning},
                    {"exp_moment", result.exp_moment},
                    {"exp_moment_se", result.exp_moment_se},
                    {"exp_moment_bound", moment_bound},
                    {"c_tau", c_tau()},
                    {"k0", k0()}},
               config);

    std::cout << "ou: E[e^{2 tau}] = " << result.exp_moment << " (bound " << moment_bound
              << ", censored " << result.censored << ")\n";
    return 0;
}

int cmd_excursions(Config config, const CommandOptions& options) {
    if (!config.excursions) config.excursions = ExcursionsConfig{};
    refresh_resolved(config);
    const ExcursionsConfig& cfg = *config.excursions;
    warn_analysis_gaps(config.params);

    const ReactionSystem system{ChainKind::X, config.rate_constants};
    RngStream rng(config.seed, 0);
    ExcursionScanner scanner(cfg.lo, cfg.hi);
    scanner.feed(0.0, static_cast<double>(cfg.x0.norm1()));
    const std::vector<StopRule> stops{{StopKind::Events, static_cast<double>(cfg.event_budget)},
                                      {StopKind::Time, cfg.time_budget}};
    const auto outcome = ssa_run_observed(
        system, cfg.x0, stops, config.params, rng,
        [&](double t, LatticeState x, int, double) {
            scanner.feed(t, static_cast<double>(x.norm1()));
        });
    const auto excursions = scanner.finish(outcome.final_time);

    auto csv = open_csv(options, "excursions.csv", config, "start,end,peak,duration,truncated");
    for (const auto& e : excursions)
        csv << fmt_double(e.start) << "," << fmt_double(e.end) << "," << fmt_double(e.peak) << ","
            << fmt_double(e.duration) << "," << (e.truncated ? 1 : 0) << "\n";
    csv.close();

    // interarrival times between consecutive excursion starts
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < excursions.size(); ++i)
        gaps.push_back(excursions[i + 1].start - excursions[i].start);
    json pvalue = nullptr;
    if (gaps.size() >= 3) pvalue = exponentiality_pvalue(gaps);

    write_json(options, "excursions_meta.json",
               json{{"x0", state_json(cfg.x0)},
                    {"lo", cfg.lo},
                    {"hi", cfg.hi},
                    {"events", outcome.events},
                    {"final_time", outcome.final_time},
                    {"stop_reason", outcome.stop_reason},
                    {"n_excursions", excursions.size()},
                    {"n_interarrivals", gaps.size()},
                    {"exponentiality_pvalue", pvalue}},
               config);

    std::cout << "excursions: " << excursions.size() << " above " << cfg.hi << " in t=["
              << 0 << ", " << outcome.final_time << "]";
    if (!pvalue.is_null()) std::cout << ", exponentiality p = " << pvalue.get<double>();
    std::cout << "\n";
    return 0;
}

}  // namespace crnstab
