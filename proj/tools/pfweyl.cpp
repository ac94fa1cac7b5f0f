#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pfw/report.hpp"

namespace {

int run(const std::string& command, const std::string& config_path,
        std::uint64_t seed, bool seed_given, const std::string& out_path,
        const std::string& csv_path, bool timings) {
    pfw::RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "pfweyl: cannot open config " << config_path << "\n";
                return 2;
            }
            nlohmann::json j = nlohmann::json::parse(in);
            config = pfw::RunConfig::from_json(j);
        } else {
            config = pfw::RunConfig::defaults();
        }
        if (seed_given) config.seed = seed;
        config.timings = timings;
        config.orbit_csv = csv_path;
    } catch (const std::exception& e) {
        std::cerr << "pfweyl: invalid config: " << e.what() << "\n";
        return 2;
    }

    pfw::RunOutcome outcome;
    try {
        outcome = pfw::run_subcommand(command, config);
    } catch (const pfw::IntegralityError& e) {
        std::cerr << "pfweyl: " << e.what() << "\n";
        return 3;
    }

    std::string text = outcome.report.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "pfweyl: cannot write report to " << out_path << "\n";
            return 2;
        }
        out << text;
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pfweyl: circle bundles from exact cocycle data on box quotients, with an "
        "identity suite and flow experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::uint64_t seed = 0;
    bool timings = false;

    app.add_option("--config", config_path, "JSON config path (defaults built in)");
    app.add_option("--seed", seed, "random seed for sampled checks");
    app.add_option("--out", out_path, "report path (stdout when omitted)");
    app.add_option("--emit-orbit-csv", csv_path,
                   "dump sample orbits (t, coordinates, windings) as CSV");
    app.add_flag("--timings", timings,
                 "include wall-clock timings in the report (breaks byte determinism)");

    for (const char* name : {"cech", "bundle", "identities", "flows", "classify", "all"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.get_subcommand("cech")->description("covering, transition potentials, cocycle, integrality");
    app.get_subcommand("bundle")->description("cech pipeline plus bundle construction and cocycle audit");
    app.get_subcommand("identities")->description("exact identity table for the canonical objects");
    app.get_subcommand("flows")->description("full flow experiments: periods, crossings, multiplicity");
    app.get_subcommand("classify")->description("theta periods and foliation trichotomy");
    app.get_subcommand("all")->description("everything");

    CLI11_PARSE(app, argc, argv);

    bool seed_given = app.count("--seed") > 0;
    std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, seed, seed_given, out_path, csv_path, timings);
    } catch (const std::exception& e) {
        std::cerr << "pfweyl: " << e.what() << "\n";
        return 2;
    }
}
