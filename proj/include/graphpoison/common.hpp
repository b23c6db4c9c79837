#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace graphpoison {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using NodePair = std::pair<int, int>;

// Error taxonomy mirrored by the CLI exit codes.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : ConfigError {
    explicit ParseError(const std::string& msg) : ConfigError(msg) {}
};

struct InfeasibleError : std::runtime_error {
    int max_feasible;
    explicit InfeasibleError(const std::string& msg, int max_feasible_budget = 0)
        : std::runtime_error(msg), max_feasible(max_feasible_budget) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based sub-seed derivation: every experiment cell hashes the root
// seed with its index path, so results do not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(root);
    for (std::uint64_t p : path) s = splitmix64(s ^ p);
    return s;
}

inline NodePair ordered(int u, int v) { return u < v ? NodePair{u, v} : NodePair{v, u}; }

}  // namespace graphpoison
