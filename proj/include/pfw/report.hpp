#ifndef PFW_REPORT_HPP
#define PFW_REPORT_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "pfw/flows.hpp"

namespace pfw {

/// Everything one invocation needs: manifold, cover resolution, gauge trial
/// count, flow parameters, seed, output switches.
struct RunConfig {
    ManifoldSpec manifold;
    int grid = 3;
    int gauge_trials = 20;
    FlowParams flow;
    std::uint64_t seed = 0;
    bool timings = false;
    std::string orbit_csv;  // empty = no CSV dump

    static RunConfig defaults();
    /// Parses the documented JSON schema; throws std::invalid_argument on
    /// malformed input.
    static RunConfig from_json(const nlohmann::json& j);
};

struct RunOutcome {
    nlohmann::ordered_json report;
    int exit_code = 0;  // 0 ok, 1 failed checks, 3 integrality violation
};

/// Executes one subcommand (cech | bundle | identities | flows | classify |
/// all) and assembles the machine-readable report. Deterministic for a fixed
/// config and seed unless timings are enabled.
RunOutcome run_subcommand(const std::string& command, const RunConfig& config);

}  // namespace pfw

#endif
