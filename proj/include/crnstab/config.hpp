#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crnstab/crn.hpp"
#include "crnstab/limits.hpp"
#include "crnstab/lyapunov.hpp"
#include "crnstab/ode.hpp"
#include "crnstab/partition.hpp"
#include "crnstab/simulate.hpp"

namespace crnstab {

/// Config problems are usage errors (CLI exit code 1); messages name the
/// violated constraint.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulateConfig {
    ChainKind chain = ChainKind::X;
    LatticeState x0{5, 5};
    std::vector<StopRule> stops{{StopKind::Time, 100.0}};
    std::uint64_t max_recorded_events = 5000000;
};

struct VerifyConfig {
    ScanRegion region = ScanRegion::OutsideInteriorCone;
    std::int64_t r_lo = 50;
    std::int64_t r_hi = 2000;
    double gamma = 1.0;
    std::vector<double> beta_sweep;  ///< extra drift scans at these beta values
    bool interface = true;
    /// The ordering needs a larger radius than the drift inequality at the
    /// default aperture, so its default window reaches further out.
    std::int64_t interface_r_lo = 50;
    std::int64_t interface_r_hi = 2600;
    std::uint64_t max_recorded = 100000;
};

struct OdeConfig {
    Vec2 x0{5.0, 5.0};
    double T = 50.0;
    double rtol = 1e-8;
    double magnitude_cap = 1e12;
    std::vector<double> grid;
    bool flow_grid = false;  ///< also sample the vector field on a mesh
    double flow_min = 0.0;
    double flow_max = 6.0;
    int flow_n = 25;
};

struct CoupleConfig {
    std::int64_t N = 1000;
    double T = 1.0;
    int replicas = 100;
};

struct OuConfig {
    OuHittingOptions options;
    std::vector<double> survival_grid;  ///< defaults to 0.5 .. 4 step 0.25
};

struct ExcursionsConfig {
    LatticeState x0{5, 5};
    double lo = 50.0;
    double hi = 200.0;
    std::uint64_t event_budget = 10000000;
    double time_budget = 1e12;
};

struct Config {
    PartitionParams params;
    std::array<double, 5> rate_constants{1, 1, 1, 1, 1};
    std::uint64_t seed = 1;

    std::optional<SimulateConfig> simulate;
    std::optional<VerifyConfig> verify;
    std::optional<OdeConfig> ode;
    std::optional<ScalingOptions> scaling;
    std::optional<CoupleConfig> couple;
    std::optional<OuConfig> ou;
    std::optional<ExcursionsConfig> excursions;

    std::string resolved;  ///< canonical JSON with all defaults filled in
    std::string hash;      ///< fnv1a-64 of resolved, hex
};

/// Parses and validates a config. Experiment blocks are optional; commands
/// fall back to their defaults when the block is absent. Throws ConfigError
/// with the violated constraint in the message.
Config parse_config(const std::string& json_text);

Config load_config_file(const std::string& path);

/// A config with every block at its defaults (used when no --config given).
Config default_config();

/// Re-resolves the canonical JSON and hash (after programmatic changes such
/// as a --seed override).
void refresh_resolved(Config& config);

}  // namespace crnstab
