#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "graphpoison/attack.hpp"
#include "graphpoison/common.hpp"
#include "graphpoison/graph.hpp"

namespace graphpoison {

enum class BaselineKind { random, ppr, degree_sum, shortest_path };

inline BaselineKind baseline_from_string(const std::string& s) {
    if (s == "random") return BaselineKind::random;
    if (s == "ppr") return BaselineKind::ppr;
    if (s == "degree_sum" || s == "degree-sum") return BaselineKind::degree_sum;
    if (s == "shortest_path" || s == "shortest-path") return BaselineKind::shortest_path;
    throw ConfigError("unknown baseline '" + s + "'");
}

namespace detail {

// Candidate pairs the attacker may touch: respects the frozen mask and the
// add/delete action, upper triangle only.
inline std::vector<NodePair> modifiable_candidates(const Graph& g, const AttackSpec& spec) {
    BoolArray frozen = frozen_mask(g.num_nodes(), spec);
    const bool adding = spec.action == Perturbation::Action::add;
    std::vector<NodePair> out;
    for (int i = 0; i < g.num_nodes(); ++i)
        for (int j = i + 1; j < g.num_nodes(); ++j) {
            if (frozen(i, j)) continue;
            if (g.has_edge(i, j) == adding) continue;
            out.emplace_back(i, j);
        }
    return out;
}

// Walks a ranked candidate list, enforcing the budget and, for deletions,
// skipping edits that would isolate a node.
inline Perturbation take_feasible(const Graph& g, const AttackSpec& spec,
                                  const std::vector<NodePair>& ranked,
                                  const std::vector<double>& scores) {
    auto deg = g.degree_vector();
    const bool adding = spec.action == Perturbation::Action::add;
    Perturbation p;
    p.action = spec.action;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        if (static_cast<int>(p.edits.size()) == spec.budget) break;
        NodePair e = ranked[k];
        if (!adding) {
            if (deg[e.first] <= 1 || deg[e.second] <= 1) continue;
            --deg[e.first];
            --deg[e.second];
        }
        p.edits.push_back(e);
        p.scores.push_back(scores.empty() ? 0.0 : scores[k]);
    }
    if (static_cast<int>(p.edits.size()) < spec.budget)
        throw InfeasibleError("budget " + std::to_string(spec.budget) + " infeasible; max feasible is " +
                                  std::to_string(p.edits.size()),
                              static_cast<int>(p.edits.size()));
    return p;
}

}  // namespace detail

inline Perturbation random_attack(const Graph& g, const AttackSpec& spec, std::uint64_t seed) {
    auto cands = detail::modifiable_candidates(g, spec);
    std::mt19937_64 rng(seed);
    std::shuffle(cands.begin(), cands.end(), rng);
    return detail::take_feasible(g, spec, cands, {});
}

/// Personalized PageRank by power iteration on the column-stochastic walk
/// operator, restart mass `alpha` on `restart`. Converges to an L1 residual
/// of 1e-10.
inline Vector personalized_pagerank(const Graph& g, const std::vector<int>& restart, double alpha) {
    if (restart.empty()) throw ConfigError("empty restart set");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("restart probability must be in (0,1]");
    const int n = g.num_nodes();
    Vector r = Vector::Zero(n);
    for (int v : restart) r[v] = 1.0 / static_cast<double>(restart.size());
    if (alpha == 1.0) return r;

    auto adj = g.adjacency_lists();
    Vector deg = g.degrees();
    Vector p = r;
    for (int iter = 0; iter < 10000; ++iter) {
        Vector next = alpha * r;
        for (int u = 0; u < n; ++u) {
            double share = (1.0 - alpha) * p[u] / deg[u];
            for (int v : adj[u]) next[v] += share;
        }
        double resid = (next - p).lpNorm<1>();
        p = next;
        if (resid < 1e-10) return p;
    }
    throw NumericError("personalized PageRank did not converge");
}

/// Ranks non-target nodes by PPR mass personalized on the two target
/// endpoints and emits the interleaved candidate stream
/// (a,x1),(b,x1),(a,x2),(b,x2),... keeping the first `budget` feasible edits.
inline Perturbation ppr_attack(const Graph& g, const AttackSpec& spec, double restart_prob = 0.15) {
    if (spec.goal != Goal::integrity) throw ConfigError("ppr baseline requires an integrity goal");
    auto [a, b] = spec.target;
    Vector score = personalized_pagerank(g, {a, b}, restart_prob);

    std::vector<int> nodes;
    for (int v = 0; v < g.num_nodes(); ++v)
        if (v != a && v != b) nodes.push_back(v);
    std::stable_sort(nodes.begin(), nodes.end(), [&](int u, int v) { return score[u] > score[v]; });

    BoolArray frozen = frozen_mask(g.num_nodes(), spec);
    const bool adding = spec.action == Perturbation::Action::add;
    std::vector<NodePair> ranked;
    std::vector<double> scores;
    for (int x : nodes)
        for (int endpoint : {a, b}) {
            NodePair e = ordered(endpoint, x);
            if (frozen(e.first, e.second)) continue;
            if (g.has_edge(e.first, e.second) == adding) continue;
            ranked.push_back(e);
            scores.push_back(score[x]);
        }
    return detail::take_feasible(g, spec, ranked, scores);
}

inline Perturbation degree_sum_attack(const Graph& g, const AttackSpec& spec) {
    if (spec.goal != Goal::availability) throw ConfigError("degree-sum baseline requires an availability goal");
    auto cands = detail::modifiable_candidates(g, spec);
    auto deg = g.degree_vector();
    std::stable_sort(cands.begin(), cands.end(), [&](NodePair x, NodePair y) {
        return deg[x.first] + deg[x.second] > deg[y.first] + deg[y.second];
    });
    std::vector<double> scores;
    for (NodePair e : cands) scores.push_back(static_cast<double>(deg[e.first] + deg[e.second]));
    return detail::take_feasible(g, spec, cands, scores);
}

/// Number of unordered node pairs (s,t) for which the edge lies on at least
/// one shortest s-t path. Computed from all-pairs BFS distances.
inline std::vector<double> shortest_path_edge_scores(const Graph& g) {
    const int n = g.num_nodes();
    const int INF = std::numeric_limits<int>::max() / 4;
    auto adj = g.adjacency_lists();
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, INF));
    for (int s = 0; s < n; ++s) {
        auto& d = dist[s];
        d[s] = 0;
        std::deque<int> q{s};
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int v : adj[u])
                if (d[v] == INF) {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
        }
    }
    std::vector<double> scores(g.edges().size(), 0.0);
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        auto [u, v] = g.edges()[e];
        double count = 0.0;
        for (int s = 0; s < n; ++s)
            for (int t = s + 1; t < n; ++t) {
                if (dist[s][t] >= INF) continue;
                if (dist[s][u] + 1 + dist[v][t] == dist[s][t] ||
                    dist[s][v] + 1 + dist[u][t] == dist[s][t]) {
                    count += 1.0;
                }
            }
        scores[e] = count;
    }
    return scores;
}

inline Perturbation shortest_path_attack(const Graph& g, const AttackSpec& spec) {
    if (spec.goal != Goal::availability)
        throw ConfigError("shortest-path baseline requires an availability goal");
    if (spec.action != Perturbation::Action::remove)
        throw ConfigError("shortest-path baseline only deletes edges");

    auto edge_scores = shortest_path_edge_scores(g);
    BoolArray frozen = frozen_mask(g.num_nodes(), spec);
    struct Candidate {
        double s;
        NodePair e;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        NodePair e = g.edges()[k];
        if (frozen(e.first, e.second)) continue;
        cands.push_back({edge_scores[k], e});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.s != y.s) return x.s > y.s;
        return x.e < y.e;
    });
    std::vector<NodePair> ranked;
    std::vector<double> scores;
    for (const Candidate& c : cands) {
        ranked.push_back(c.e);
        scores.push_back(c.s);
    }
    return detail::take_feasible(g, spec, ranked, scores);
}

}  // namespace graphpoison
