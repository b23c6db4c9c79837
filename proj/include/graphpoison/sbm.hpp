#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "graphpoison/common.hpp"
#include "graphpoison/graph.hpp"

namespace graphpoison {

/// Stochastic block model sampler with equal-size blocks. Nodes left with
/// degree 0 get one edge to a random node in their own block, keeping the
/// graph embeddable.
inline Graph generate_sbm(int n, int blocks, double p_in, double p_out, std::uint64_t seed) {
    if (n < 2 || blocks < 1 || blocks > n) throw ConfigError("bad SBM shape");
    if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1) throw ConfigError("SBM probabilities must be in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto block_of = [&](int v) { return v * blocks / n; };
    std::vector<NodePair> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double p = block_of(u) == block_of(v) ? p_in : p_out;
            if (unif(rng) < p) edges.emplace_back(u, v);
        }

    std::vector<int> deg(n, 0);
    for (auto [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    for (int u = 0; u < n; ++u) {
        if (deg[u] > 0) continue;
        std::uniform_int_distribution<int> pick(0, n - 1);
        int v = u;
        while (v == u) v = pick(rng);
        edges.push_back(ordered(u, v));
        ++deg[u];
        ++deg[v];
    }
    return Graph(n, std::move(edges));
}

}  // namespace graphpoison
