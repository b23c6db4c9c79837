#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphpoison/common.hpp"

namespace graphpoison {

/// Undirected simple graph. Edges are stored as sorted unique (u,v) pairs
/// with u < v; the dense adjacency view is derived on demand.
class Graph {
public:
    Graph() = default;
    Graph(int n, std::vector<NodePair> edges, std::vector<std::string> labels = {})
        : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
        normalize_edges();
        validate();
    }

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    double volume() const { return 2.0 * static_cast<double>(edges_.size()); }
    const std::vector<NodePair>& edges() const { return edges_; }
    const std::vector<std::string>& node_labels() const { return labels_; }

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        return std::binary_search(edges_.begin(), edges_.end(), ordered(u, v));
    }

    Matrix adjacency() const {
        Matrix a = Matrix::Zero(n_, n_);
        for (auto [u, v] : edges_) {
            a(u, v) = 1.0;
            a(v, u) = 1.0;
        }
        return a;
    }

    std::vector<int> degree_vector() const {
        std::vector<int> deg(n_, 0);
        for (auto [u, v] : edges_) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }

    Vector degrees() const {
        Vector d = Vector::Zero(n_);
        for (auto [u, v] : edges_) {
            d[u] += 1.0;
            d[v] += 1.0;
        }
        return d;
    }

    int min_degree() const {
        auto deg = degree_vector();
        return deg.empty() ? 0 : *std::min_element(deg.begin(), deg.end());
    }

    std::vector<std::vector<int>> adjacency_lists() const {
        std::vector<std::vector<int>> adj(n_);
        for (auto [u, v] : edges_) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }

    bool connected() const {
        if (n_ == 0) return false;
        auto adj = adjacency_lists();
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        return count == n_;
    }

private:
    void normalize_edges() {
        for (auto& e : edges_) e = ordered(e.first, e.second);
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    void validate() const {
        for (auto [u, v] : edges_) {
            if (u == v) throw ConfigError("graph has a self-loop at node " + std::to_string(u));
            if (u < 0 || v >= n_)
                throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for n=" + std::to_string(n_));
        }
    }

    int n_ = 0;
    std::vector<NodePair> edges_;
    std::vector<std::string> labels_;
};

/// Ordered list of edge edits produced by an attack, with the relaxed-matrix
/// score that ranked each edit.
struct Perturbation {
    enum class Action { add, remove };
    Action action = Action::add;
    std::vector<NodePair> edits;
    std::vector<double> scores;
};

inline const char* to_string(Perturbation::Action a) {
    return a == Perturbation::Action::add ? "add" : "delete";
}

inline Perturbation::Action action_from_string(const std::string& s) {
    if (s == "add") return Perturbation::Action::add;
    if (s == "delete" || s == "del" || s == "remove") return Perturbation::Action::remove;
    throw ConfigError("unknown action '" + s + "' (expected add or delete)");
}

/// Reads a whitespace-separated edge list. Nodes are densely re-indexed in
/// first-appearance order; duplicate and reversed-duplicate lines collapse;
/// self-loops are dropped (count reported through `dropped_self_loops`).
inline Graph load_edge_list(const std::string& path, int* dropped_self_loops = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list: " + path);

    std::unordered_map<std::string, int> index;
    std::vector<std::string> labels;
    std::vector<NodePair> edges;
    int self_loops = 0;

    auto node_id = [&](const std::string& tok) {
        auto it = index.find(tok);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(labels.size());
        index.emplace(tok, id);
        labels.push_back(tok);
        return id;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a >> b))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected two node tokens");
        if (ls >> extra)
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing token '" + extra + "'");
        int u = node_id(a), v = node_id(b);
        if (u == v) {
            ++self_loops;
            continue;
        }
        edges.push_back(ordered(u, v));
    }
    if (labels.empty() || edges.empty()) throw ParseError(path + ": empty graph");
    if (dropped_self_loops) *dropped_self_loops = self_loops;
    const int n = static_cast<int>(labels.size());
    return Graph(n, std::move(edges), std::move(labels));
}

/// Applies edge edits, returning a new graph. Deletions that would isolate a
/// node are rejected: the degree-regularized proximity matrices are undefined
/// for isolated nodes.
inline Graph apply_perturbation(const Graph& g, const Perturbation& p) {
    std::vector<NodePair> edges = g.edges();
    auto deg = g.degree_vector();
    auto name = [](NodePair e) {
        return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
    };

    std::vector<NodePair> seen;
    for (NodePair raw : p.edits) {
        NodePair e = ordered(raw.first, raw.second);
        if (e.first == e.second) throw ConfigError("edit is a self-loop at node " + std::to_string(e.first));
        if (e.first < 0 || e.second >= g.num_nodes())
            throw ConfigError("edit " + name(e) + " out of range");
        if (std::find(seen.begin(), seen.end(), e) != seen.end())
            throw ConfigError("duplicate edit " + name(e));
        seen.push_back(e);

        if (p.action == Perturbation::Action::add) {
            if (g.has_edge(e.first, e.second)) throw ConfigError("add edit " + name(e) + " already an edge");
            edges.push_back(e);
            ++deg[e.first];
            ++deg[e.second];
        } else {
            if (!g.has_edge(e.first, e.second)) throw ConfigError("delete edit " + name(e) + " is not an edge");
            if (deg[e.first] <= 1 || deg[e.second] <= 1)
                throw ConfigError("delete edit " + name(e) + " would isolate a node");
            edges.erase(std::remove(edges.begin(), edges.end(), e), edges.end());
            --deg[e.first];
            --deg[e.second];
        }
    }
    return Graph(g.num_nodes(), std::move(edges), g.node_labels());
}

}  // namespace graphpoison
