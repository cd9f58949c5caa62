#include "lgspi/check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lgspi/errors.hpp"

namespace lgspi {

Query random_query(std::uint64_t seed, const Network& net) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::vector<NodeId> pool = net.ids();
    std::shuffle(pool.begin(), pool.end(), rng);

    Query q;
    std::size_t next = 0;
    const std::size_t n_targets = std::min<std::size_t>(pick(1, 3), pool.size());
    while (q.targets.size() < n_targets) q.targets.insert(pool[next++]);

    if (next < pool.size() && pick(0, 2) == 0) {
        const std::size_t n = std::min(pick(1, 2), pool.size() - next);
        for (std::size_t i = 0; i < n; ++i) q.given.insert(pool[next++]);
    }
    if (next < pool.size() && pick(0, 1) == 0) {
        const std::size_t n = std::min(pick(1, 3), pool.size() - next);
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        for (std::size_t i = 0; i < n; ++i) {
            const NodeId& id = pool[next++];
            Vector v(net.node(id).dim);
            for (double& x : v) x = value(rng);
            q.evidence.emplace(id, std::move(v));
        }
    }
    return q;
}

double max_deviation(const QueryResult& engine, const OracleAnswer& oracle) {
    double dev = std::max(max_abs_diff(engine.mean(), oracle.mean), max_abs_diff(engine.covariance(), oracle.cov));
    if (engine.links().size() != oracle.links.size()) return INFINITY;
    for (std::size_t i = 0; i < oracle.links.size(); ++i) {
        if (engine.links()[i].id != oracle.links[i].id) return INFINITY;
        dev = std::max(dev, max_abs_diff(engine.links()[i].K, oracle.links[i].K));
    }
    if (engine.answer.members() != oracle.layout) return INFINITY;
    return dev;
}

CheckReport run_check(const CheckConfig& config) {
    CheckReport report;
    for (std::size_t k = 0; k < config.seeds; ++k) {
        const std::uint64_t seed = config.base_seed + k;
        RandomNetworkParams params = config.network;
        std::mt19937_64 size_rng(seed * 7919 + 17);
        params.n_nodes = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(config.max_nodes, 1))(size_rng);
        const Network net = random_network(seed, params);
        const JointMoments jm = joint_moments(net);
        const Engine engine(net, config.engine);
        ++report.networks;

        for (std::size_t j = 0; j < config.queries_per_network; ++j) {
            const Query q = random_query(seed * 1000 + j, net);
            ++report.queries;
            double dev = INFINITY;
            std::string note;
            try {
                const QueryResult got = engine.answer(q);
                const OracleAnswer want = oracle_query(jm, q.targets, q.given, q.evidence, config.engine.tolerances);
                dev = max_deviation(got, want);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::CombinabilityError) ++report.combinability_errors;
                note = e.what();
            }
            report.max_deviation = std::max(report.max_deviation, dev);
            if (!(dev <= config.tolerance)) {
                ++report.failures;
                if (report.failure_notes.size() < 10) {
                    std::ostringstream s;
                    s << "seed " << seed << " query " << j << ": deviation " << dev;
                    if (!note.empty()) s << " (" << note << ")";
                    report.failure_notes.push_back(s.str());
                }
            }
        }
    }
    return report;
}

}  // namespace lgspi
