#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "toricgap/model.hpp"

namespace toricgap {

/// Fully resolved run description. Unknown keys are rejected.
struct RunConfig {
    std::string command;
    Topology topology = Topology::Torus;
    int l1 = 2;
    int l2 = 2;
    PerturbationSpec perturbation;
    int k = 2;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string sector;  // empty: all sectors
    int n = 8;           // time slices / propagation length
    int max_volume = 6;
    int ledger_volume = 3;  // literal polymer ledger, <= max_volume
    int samples = 100;
    int sites = 3;  // perturbation terms in the dense inclusion-exclusion check
    std::vector<std::pair<int, int>> sizes;
    std::string identity = "all";
    std::vector<int> syndrome = {0, 1};
    int workers = 1;
    std::string output_path;
    std::string output_format = "csv";
};

inline const std::vector<std::string> kCommands = {"spectrum", "splitting",     "thin-torus", "cluster-energy",
                                                   "count-clusters", "verify", "excitation-gap"};

/// Throws Error(Config) on malformed input.
RunConfig parse_config(const nlohmann::json &j);
nlohmann::json to_json(const RunConfig &c);
/// "2x2,3x3" -> {(2,2), (3,3)}.
std::vector<std::pair<int, int>> parse_sizes(const std::string &text);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

struct Report {
    nlohmann::json summary;
    std::vector<Table> tables;

    /// Summary with the resolved config and all tables embedded.
    nlohmann::json to_json() const;
};

/// Runs one subcommand. Errors propagate as toricgap::Error.
Report run(const RunConfig &c);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double x);

}  // namespace toricgap
