#pragma once

// Randomized comparison of engine answers against the dense oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "lgspi/oracle.hpp"
#include "lgspi/query_engine.hpp"

namespace lgspi {

// Random query over `net`: 1-3 targets, optionally 1-2 given nodes and 1-3
// evidence nodes (values uniform in [-5, 5]), all disjoint.
Query random_query(std::uint64_t seed, const Network& net);

// Largest absolute difference over mean, covariance and given-node links.
double max_deviation(const QueryResult& engine, const OracleAnswer& oracle);

struct CheckConfig {
    std::size_t seeds = 100;
    std::uint64_t base_seed = 0;
    std::size_t max_nodes = 12;
    std::size_t queries_per_network = 5;
    RandomNetworkParams network{12, 3, 3};
    double tolerance = 1e-8;
    EngineOptions engine;
};

struct CheckReport {
    std::size_t networks = 0;
    std::size_t queries = 0;
    double max_deviation = 0.0;
    std::size_t failures = 0;
    std::size_t combinability_errors = 0;
    std::vector<std::string> failure_notes;  // first few failures

    bool passed() const { return failures == 0 && combinability_errors == 0; }
};

// Network k uses seed base_seed + k and a node count drawn from
// [1, max_nodes]; each gets queries_per_network random queries.
CheckReport run_check(const CheckConfig& config);

}  // namespace lgspi
