#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphpoison/common.hpp"
#include "graphpoison/graph.hpp"
#include "graphpoison/json_util.hpp"

namespace graphpoison {

/// Link-prediction holdout: positives are edges removed from the graph,
/// negatives are uniformly sampled non-edges of the original graph.
/// test : validation sizes are 2 : 1 (up to rounding).
struct LinkSplit {
    Graph train_graph;
    std::vector<NodePair> test_pos, test_neg, val_pos, val_neg;
    std::uint64_t seed = 0;
};

inline LinkSplit split_links(const Graph& g, double holdout_frac, std::uint64_t seed) {
    if (!(holdout_frac > 0.0 && holdout_frac < 1.0))
        throw ConfigError("holdout fraction must be in (0,1)");
    const int m = g.num_edges();
    const int n = g.num_nodes();
    const int n_remove = static_cast<int>(std::lround(holdout_frac * m));
    if (n_remove < 1) throw ConfigError("holdout fraction removes no edges");

    std::mt19937_64 rng(seed);

    // Positives: shuffled pass over the edges, rejecting any removal that
    // would drop an endpoint to degree 0. Repeated passes re-examine edges
    // whose rejection may have been unblocked by later removals.
    std::vector<NodePair> pool = g.edges();
    std::shuffle(pool.begin(), pool.end(), rng);
    auto deg = g.degree_vector();
    std::set<NodePair> removed;
    for (int pass = 0; pass < 8 && static_cast<int>(removed.size()) < n_remove; ++pass) {
        for (NodePair e : pool) {
            if (static_cast<int>(removed.size()) >= n_remove) break;
            if (removed.count(e)) continue;
            if (deg[e.first] <= 1 || deg[e.second] <= 1) continue;
            removed.insert(e);
            --deg[e.first];
            --deg[e.second];
        }
    }
    if (static_cast<int>(removed.size()) < n_remove)
        throw InfeasibleError("cannot remove " + std::to_string(n_remove) +
                              " edges without isolating a node");

    // Negatives: uniform rejection sampling over non-edges of the original graph.
    std::set<NodePair> negatives;
    std::uniform_int_distribution<int> pick(0, n - 1);
    const long long max_tries = 1000LL * n_remove + 100000;
    long long tries = 0;
    while (static_cast<int>(negatives.size()) < n_remove) {
        if (++tries > max_tries)
            throw InfeasibleError("graph too dense to sample " + std::to_string(n_remove) +
                                  " negative pairs");
        int u = pick(rng), v = pick(rng);
        if (u == v || g.has_edge(u, v)) continue;
        negatives.insert(ordered(u, v));
    }

    std::vector<NodePair> pos(removed.begin(), removed.end());
    std::vector<NodePair> neg(negatives.begin(), negatives.end());
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    const int n_val = static_cast<int>(std::lround(n_remove / 3.0));
    const int n_test = n_remove - n_val;

    LinkSplit split;
    split.seed = seed;
    split.test_pos.assign(pos.begin(), pos.begin() + n_test);
    split.val_pos.assign(pos.begin() + n_test, pos.end());
    split.test_neg.assign(neg.begin(), neg.begin() + n_test);
    split.val_neg.assign(neg.begin() + n_test, neg.end());

    std::vector<NodePair> train_edges;
    for (NodePair e : g.edges())
        if (!removed.count(e)) train_edges.push_back(e);
    split.train_graph = Graph(n, std::move(train_edges), g.node_labels());
    return split;
}

inline nlohmann::json to_json(const LinkSplit& s) {
    return nlohmann::json{{"n", s.train_graph.num_nodes()},
                          {"train_edges", pairs_to_json(s.train_graph.edges())},
                          {"test_pos", pairs_to_json(s.test_pos)},
                          {"test_neg", pairs_to_json(s.test_neg)},
                          {"val_pos", pairs_to_json(s.val_pos)},
                          {"val_neg", pairs_to_json(s.val_neg)},
                          {"seed", s.seed}};
}

inline LinkSplit split_from_json(const nlohmann::json& j) {
    LinkSplit s;
    s.train_graph = Graph(j.at("n").get<int>(), pairs_from_json(j.at("train_edges")));
    s.test_pos = pairs_from_json(j.at("test_pos"));
    s.test_neg = pairs_from_json(j.at("test_neg"));
    s.val_pos = pairs_from_json(j.at("val_pos"));
    s.val_neg = pairs_from_json(j.at("val_neg"));
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

}  // namespace graphpoison
