#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphpoison/common.hpp"
#include "graphpoison/embedding.hpp"
#include "graphpoison/graph.hpp"
#include "graphpoison/json_util.hpp"
#include "graphpoison/proximity.hpp"

namespace graphpoison {

enum class Goal { integrity, availability };
enum class Direction { up, down };
enum class Constraint { direct, indirect, none };

inline Constraint constraint_from_string(const std::string& s) {
    if (s == "direct") return Constraint::direct;
    if (s == "indirect") return Constraint::indirect;
    if (s == "none") return Constraint::none;
    throw ConfigError("unknown constraint '" + s + "'");
}

struct AttackSpec {
    Goal goal = Goal::integrity;
    NodePair target{0, 1};                        // integrity target pair
    Direction direction = Direction::up;
    std::vector<NodePair> target_pos, target_neg;  // availability test pairs
    Constraint constraint = Constraint::none;
    Perturbation::Action action = Perturbation::Action::add;
    int budget = 1;
    double step_size = 1.0;
    int iterations = 50;
    double epsilon_init = 1e-3;
    int refactor_every = 1;
};

/// Weighted adjacency iterate of the relaxed attack problem. Frozen cells
/// always hold their clean value.
struct RelaxedAdjacency {
    Matrix W;
    BoolArray frozen;
    Matrix A_org;
    std::vector<double> loss_trace;
};

/// Cells the attacker may never touch: the diagonal, the target pair(s),
/// and whatever the direct/indirect constraint rules out.
inline BoolArray frozen_mask(int n, const AttackSpec& spec) {
    BoolArray frozen = BoolArray::Constant(n, n, false);
    for (int i = 0; i < n; ++i) frozen(i, i) = true;

    auto freeze = [&](NodePair p) {
        frozen(p.first, p.second) = true;
        frozen(p.second, p.first) = true;
    };

    if (spec.goal == Goal::integrity) {
        auto [a, b] = spec.target;
        if (a < 0 || b >= n || a == b) throw ConfigError("invalid integrity target pair");
        if (spec.constraint == Constraint::direct) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != a && i != b && j != a && j != b) frozen(i, j) = true;
        } else if (spec.constraint == Constraint::indirect) {
            for (int i = 0; i < n; ++i) {
                freeze({a, i});
                freeze({b, i});
            }
        }
        freeze(spec.target);
    } else {
        for (NodePair p : spec.target_pos) freeze(p);
        for (NodePair p : spec.target_neg) freeze(p);
    }
    return frozen;
}

/// The quantity PGD descends: -[XX^T]_ij for integrity-up, +[XX^T]_ij for
/// integrity-down, sum_pos - sum_neg for availability.
inline double attack_loss(const Embedding& e, const AttackSpec& spec) {
    if (spec.goal == Goal::integrity) {
        double s = e.X.row(spec.target.first).dot(e.X.row(spec.target.second));
        return spec.direction == Direction::up ? -s : s;
    }
    double loss = 0.0;
    for (auto [i, j] : spec.target_pos) loss += e.X.row(i).dot(e.X.row(j));
    for (auto [i, j] : spec.target_neg) loss -= e.X.row(i).dot(e.X.row(j));
    return loss;
}

inline Matrix grad_loss_wrt_X(const Embedding& e, const AttackSpec& spec) {
    Matrix g = Matrix::Zero(e.X.rows(), e.X.cols());
    auto add_term = [&](NodePair p, double sign) {
        g.row(p.first) += sign * e.X.row(p.second);
        g.row(p.second) += sign * e.X.row(p.first);
    };
    if (spec.goal == Goal::integrity) {
        add_term(spec.target, spec.direction == Direction::up ? -1.0 : 1.0);
    } else {
        for (NodePair p : spec.target_pos) add_term(p, 1.0);
        for (NodePair p : spec.target_neg) add_term(p, -1.0);
    }
    return g;
}

/// Implicit gradient through the factorization: each observed cell (i,j)
/// receives (gram_inv_i gX_i) . Y_j, the per-row KKT sensitivity of X_i to
/// Z_ij with the context factor held fixed.
inline Matrix grad_loss_wrt_Z(const Embedding& e, const Matrix& gX, const ProximityModel& model) {
    const int n = static_cast<int>(model.Z.rows());
    Matrix gZ = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (model.omega_rows[i].empty()) continue;
        if (e.gram_inv[i].size() == 0)
            throw NumericError("missing cached Gram inverse; re-run factorize with ridge > 0");
        Vector u = e.gram_inv[i] * gX.row(i).transpose();
        for (int j : model.omega_rows[i]) gZ(i, j) = e.Y.row(j).dot(u);
    }
    return gZ;
}

namespace detail {

inline Matrix symmetrize_zero_diag(Matrix g) {
    g = ((g + g.transpose()) / 2.0).eval();
    g.diagonal().setZero();
    return g;
}

}  // namespace detail

/// Elementwise chain for the second-order proximity matrix: dZ_ij/dW_ij = 1/W_ij
/// on observed cells.
inline Matrix grad_Z_wrt_A_line(const Matrix& gZ, const Matrix& W, const ProximityModel& model) {
    const int n = static_cast<int>(W.rows());
    Matrix gA = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j : model.omega_rows[i]) {
            if (!(W(i, j) > 0.0))
                throw NumericError("observed cell (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") has zero weight");
            gA(i, j) = gZ(i, j) / W(i, j);
        }
    return detail::symmetrize_zero_diag(std::move(gA));
}

/// Adjoint chain through the window-averaged random-walk matrix:
/// d(P^r) = sum_k P^{k-1} dP P^{r-k}, with vol and D held constant.
inline Matrix grad_Z_wrt_A_deepwalk(const Matrix& gZ, const Matrix& W, const ProximityModel& model) {
    const int T = model.spec.window;
    if (T < 1) throw ConfigError("window must be >= 1");
    const int n = static_cast<int>(W.rows());
    const Vector& deg = model.degrees;
    const Vector inv_deg = deg.cwiseInverse();

    std::vector<Matrix> pow(static_cast<std::size_t>(T) + 1);
    pow[0] = Matrix::Identity(n, n);
    Matrix P = inv_deg.asDiagonal() * W;
    Matrix S = Matrix::Zero(n, n);
    for (int r = 1; r <= T; ++r) {
        pow[static_cast<std::size_t>(r)] = pow[static_cast<std::size_t>(r - 1)] * P;
        S += pow[static_cast<std::size_t>(r)];
    }
    S /= static_cast<double>(T);
    Matrix M = model.vol * (S * inv_deg.asDiagonal());  // argument of the elementwise log

    Matrix gS = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j : model.omega_rows[i]) {
            if (!(M(i, j) > 0.0))
                throw NumericError("observed cell with non-positive proximity argument");
            gS(i, j) = model.vol * (gZ(i, j) / M(i, j)) * inv_deg[j];
        }

    Matrix gP = Matrix::Zero(n, n);
    for (int r = 1; r <= T; ++r)
        for (int k = 1; k <= r; ++k)
            gP.noalias() += pow[static_cast<std::size_t>(k - 1)].transpose() * gS *
                            pow[static_cast<std::size_t>(r - k)].transpose();
    gP /= static_cast<double>(T);

    Matrix gA = inv_deg.asDiagonal() * gP;
    return detail::symmetrize_zero_diag(std::move(gA));
}

inline Matrix grad_Z_wrt_A(const Matrix& gZ, const Matrix& W, const ProximityModel& model) {
    return model.spec.method == Method::line2 ? grad_Z_wrt_A_line(gZ, W, model)
                                              : grad_Z_wrt_A_deepwalk(gZ, W, model);
}

namespace detail {

inline void check_pgd_preconditions(const Graph& g, const AttackSpec& spec) {
    if (spec.budget < 0) throw ConfigError("budget must be non-negative");
    if (spec.goal == Goal::integrity) {
        auto [a, b] = spec.target;
        if (a < 0 || b >= g.num_nodes() || a == b) throw ConfigError("invalid target pair");
    } else {
        for (auto pairs : {&spec.target_pos, &spec.target_neg})
            for (auto [i, j] : *pairs)
                if (i < 0 || j >= g.num_nodes() || i == j)
                    throw ConfigError("availability target pair out of range");
    }
}

}  // namespace detail

/// Projected gradient descent on the relaxed weighted adjacency. Modifiable
/// zero cells start at epsilon_init under action=add so the proximity support
/// can reach them; the step shrinks as s0/sqrt(1+t); frozen cells are held at
/// their clean value bit-exactly.
inline RelaxedAdjacency pgd(const Graph& g, const AttackSpec& spec, const ProximitySpec& prox,
                            std::uint64_t seed, const AlsOptions& als = {}) {
    detail::check_pgd_preconditions(g, spec);
    if (spec.refactor_every < 1) throw ConfigError("refactor_every must be >= 1");
    const int n = g.num_nodes();

    RelaxedAdjacency relaxed;
    relaxed.A_org = g.adjacency();
    relaxed.frozen = frozen_mask(n, spec);
    relaxed.W = relaxed.A_org;
    if (spec.action == Perturbation::Action::add) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && !relaxed.frozen(i, j) && relaxed.W(i, j) == 0.0)
                    relaxed.W(i, j) = spec.epsilon_init;
    }

    Embedding emb;
    ProximityModel model;
    bool have_emb = false;
    for (int t = 0; t < spec.iterations; ++t) {
        if (t % spec.refactor_every == 0 || !have_emb) {
            model = build_Z(relaxed.W, prox);
            emb = factorize(model, seed, als, have_emb ? &emb : nullptr);
            have_emb = true;
        }
        relaxed.loss_trace.push_back(attack_loss(emb, spec));

        Matrix gX = grad_loss_wrt_X(emb, spec);
        Matrix gZ = grad_loss_wrt_Z(emb, gX, model);
        Matrix gA = grad_Z_wrt_A(gZ, relaxed.W, model);
        gA = relaxed.frozen.select(0.0, gA.array()).matrix();

        double step = spec.step_size / std::sqrt(1.0 + static_cast<double>(t));
        Matrix prev = relaxed.W;
        relaxed.W = (relaxed.W - step * gA).cwiseMax(0.0).cwiseMin(1.0);
        relaxed.W = relaxed.frozen.select(relaxed.A_org.array(), relaxed.W.array()).matrix();
        // the proximity matrices need every relaxed degree positive; if the
        // clip zeroed out a whole row, roll that node back one step
        Vector row_sums = relaxed.W.rowwise().sum();
        for (int i = 0; i < n; ++i)
            if (!(row_sums[i] > 0.0)) {
                relaxed.W.row(i) = prev.row(i);
                relaxed.W.col(i) = prev.col(i);
            }
    }
    if (spec.iterations > 0) {
        model = build_Z(relaxed.W, prox);
        emb = factorize(model, seed, als, have_emb ? &emb : nullptr);
        relaxed.loss_trace.push_back(attack_loss(emb, spec));
    }
    return relaxed;
}

/// Rounds the relaxed matrix to a budget-limited edit list: adds pick the
/// free non-edges with largest weight, deletions the free edges with smallest
/// weight. Lexicographic tie-break; deletions that would isolate a node are
/// skipped and replaced by the next candidate.
inline Perturbation project_discrete(const RelaxedAdjacency& relaxed, const AttackSpec& spec) {
    const int n = static_cast<int>(relaxed.W.rows());
    const bool adding = spec.action == Perturbation::Action::add;

    struct Candidate {
        double w;
        NodePair e;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (relaxed.frozen(i, j)) continue;
            bool is_edge = relaxed.A_org(i, j) != 0.0;
            if (adding == is_edge) continue;
            cands.push_back({relaxed.W(i, j), {i, j}});
        }
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.w != b.w) return adding ? a.w > b.w : a.w < b.w;
        return a.e < b.e;
    });

    std::vector<int> deg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) deg[i] += relaxed.A_org(i, j) != 0.0 ? 1 : 0;

    Perturbation p;
    p.action = spec.action;
    for (const Candidate& c : cands) {
        if (static_cast<int>(p.edits.size()) == spec.budget) break;
        if (!adding && (deg[c.e.first] <= 1 || deg[c.e.second] <= 1)) continue;
        if (!adding) {
            --deg[c.e.first];
            --deg[c.e.second];
        }
        p.edits.push_back(c.e);
        p.scores.push_back(c.w);
    }
    if (static_cast<int>(p.edits.size()) < spec.budget)
        throw InfeasibleError("budget " + std::to_string(spec.budget) + " infeasible; max feasible is " +
                                  std::to_string(p.edits.size()),
                              static_cast<int>(p.edits.size()));
    return p;
}

inline nlohmann::json to_json(const AttackSpec& s) {
    nlohmann::json j{{"goal", s.goal == Goal::integrity ? "integrity" : "availability"},
                     {"constraint", s.constraint == Constraint::direct     ? "direct"
                                    : s.constraint == Constraint::indirect ? "indirect"
                                                                           : "none"},
                     {"action", to_string(s.action)},
                     {"budget", s.budget},
                     {"step_size", s.step_size},
                     {"iterations", s.iterations},
                     {"epsilon_init", s.epsilon_init},
                     {"refactor_every", s.refactor_every}};
    if (s.goal == Goal::integrity) {
        j["target"] = {s.target.first, s.target.second};
        j["direction"] = s.direction == Direction::up ? "up" : "down";
    } else {
        j["target_pos"] = pairs_to_json(s.target_pos);
        j["target_neg"] = pairs_to_json(s.target_neg);
    }
    return j;
}

}  // namespace graphpoison
