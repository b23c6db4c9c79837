#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphpoison/attack.hpp"
#include "graphpoison/baselines.hpp"
#include "graphpoison/common.hpp"
#include "graphpoison/embedding.hpp"
#include "graphpoison/json_util.hpp"
#include "graphpoison/split.hpp"

namespace graphpoison {

/// AP over a ranked binary list. Ties rank positives last, which makes the
/// value pessimistic and deterministic.
inline double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ConfigError("scores/labels length mismatch");
    int n_pos = 0;
    for (int l : labels) n_pos += l != 0 ? 1 : 0;
    if (n_pos == 0) throw ConfigError("average precision needs at least one positive label");

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return labels[a] < labels[b];  // positives last among ties
    });
    double ap = 0.0;
    int hits = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]] != 0) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return ap / static_cast<double>(n_pos);
}

struct EvaluationReport {
    Method method = Method::deepwalk;  // method the evaluation embedding uses
    std::string attack;
    Perturbation::Action action = Perturbation::Action::add;
    std::vector<int> budgets;
    std::vector<double> metric_curve;               // per-budget mean (AP or cosine delta)
    std::vector<std::vector<double>> per_seed;      // raw values per budget
    std::vector<std::vector<double>> per_seed_inner;  // integrity only: inner-product deltas
    double baseline_clean = 0.0;
    int failed_targets = 0;
};

struct ExperimentOptions {
    int n_targets = 8;
    int n_seeds = 5;
    std::uint64_t root_seed = 1;
    int workers = 1;
    AlsOptions als;
    // PGD knobs for the optimization attack; the attacker's surrogate may use
    // its own factorization options (e.g. a heavier ridge, which damps
    // ill-conditioned KKT sensitivities in the implicit gradient)
    AlsOptions attack_als;
    double step_size = 1.0;
    int iterations = 30;
    double epsilon_init = 1e-3;
    int refactor_every = 1;
    double ppr_restart = 0.15;
};

namespace detail {

inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, workers);
    if (workers == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < std::min(workers, count); ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline Perturbation run_attack(const Graph& g, const AttackSpec& aspec, const ProximitySpec& prox,
                               const std::string& attack, std::uint64_t seed,
                               const ExperimentOptions& opt) {
    if (attack == "opt") return project_discrete(pgd(g, aspec, prox, seed, opt.attack_als), aspec);
    if (attack == "random") return random_attack(g, aspec, seed);
    if (attack == "ppr") return ppr_attack(g, aspec, opt.ppr_restart);
    if (attack == "degree_sum") return degree_sum_attack(g, aspec);
    if (attack == "shortest_path") return shortest_path_attack(g, aspec);
    throw ConfigError("unknown attack '" + attack + "'");
}

inline double availability_ap(const Graph& g, const LinkSplit& split, const ProximitySpec& prox,
                              std::uint64_t embed_seed, const AlsOptions& als) {
    Embedding emb = factorize(build_Z(g, prox), embed_seed, als);
    std::vector<NodePair> pairs = split.test_pos;
    pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
    Vector s = cosine_scores(emb, pairs);
    std::vector<double> scores(s.data(), s.data() + s.size());
    std::vector<int> labels(split.test_pos.size(), 1);
    labels.resize(pairs.size(), 0);
    return average_precision(scores, labels);
}

inline AttackSpec availability_spec(const LinkSplit& split, Perturbation::Action action, int budget,
                                    const ExperimentOptions& opt) {
    AttackSpec aspec;
    aspec.goal = Goal::availability;
    aspec.target_pos = split.test_pos;
    aspec.target_neg = split.test_neg;
    aspec.action = action;
    aspec.budget = budget;
    aspec.step_size = opt.step_size;
    aspec.iterations = opt.iterations;
    aspec.epsilon_init = opt.epsilon_init;
    aspec.refactor_every = opt.refactor_every;
    return aspec;
}

inline void finalize_curve(EvaluationReport& rep) {
    for (const auto& vals : rep.per_seed) {
        double mean = vals.empty() ? 0.0
                                   : std::accumulate(vals.begin(), vals.end(), 0.0) /
                                         static_cast<double>(vals.size());
        rep.metric_curve.push_back(mean);
    }
}

}  // namespace detail

/// Availability protocol: perturb the train graph, re-embed, score the test
/// pairs with cosine similarity, report AP per budget x seed.
inline EvaluationReport run_availability_experiment(const LinkSplit& split, const ProximitySpec& prox,
                                                    const std::string& attack,
                                                    Perturbation::Action action,
                                                    const std::vector<int>& budgets,
                                                    const ExperimentOptions& opt) {
    EvaluationReport rep;
    rep.method = prox.method;
    rep.attack = attack;
    rep.action = action;
    rep.budgets = budgets;
    rep.per_seed.assign(budgets.size(), std::vector<double>(static_cast<std::size_t>(opt.n_seeds)));

    {
        double clean = 0.0;
        for (int s = 0; s < opt.n_seeds; ++s)
            clean += detail::availability_ap(split.train_graph, split, prox,
                                             derive_seed(opt.root_seed, {0xc1ea, static_cast<std::uint64_t>(s)}),
                                             opt.als);
        rep.baseline_clean = clean / std::max(1, opt.n_seeds);
    }

    const int cells = static_cast<int>(budgets.size()) * opt.n_seeds;
    detail::parallel_for(cells, opt.workers, [&](int cell) {
        const int bi = cell / opt.n_seeds;
        const int s = cell % opt.n_seeds;
        std::uint64_t seed = derive_seed(opt.root_seed, {1, static_cast<std::uint64_t>(bi),
                                                         static_cast<std::uint64_t>(s)});
        if (budgets[static_cast<std::size_t>(bi)] == 0) {
            rep.per_seed[static_cast<std::size_t>(bi)][static_cast<std::size_t>(s)] =
                detail::availability_ap(split.train_graph, split, prox, derive_seed(seed, {2}), opt.als);
            return;
        }
        AttackSpec aspec =
            detail::availability_spec(split, action, budgets[static_cast<std::size_t>(bi)], opt);
        Perturbation p = detail::run_attack(split.train_graph, aspec, prox, attack, seed, opt);
        Graph poisoned = apply_perturbation(split.train_graph, p);
        rep.per_seed[static_cast<std::size_t>(bi)][static_cast<std::size_t>(s)] =
            detail::availability_ap(poisoned, split, prox, derive_seed(seed, {2}), opt.als);
    });
    detail::finalize_curve(rep);
    return rep;
}

/// Integrity protocol: targets are sampled from the held-out negatives (up)
/// or positives (down); the metric is the cosine-score change of the target
/// pair between the clean and poisoned train-graph embeddings.
inline EvaluationReport run_integrity_experiment(const LinkSplit& split, const ProximitySpec& prox,
                                                 const std::string& attack, const AttackSpec& spec_template,
                                                 const std::vector<int>& budgets,
                                                 const ExperimentOptions& opt) {
    const auto& pool = spec_template.direction == Direction::up ? split.test_neg : split.test_pos;
    if (static_cast<int>(pool.size()) < opt.n_targets)
        throw InfeasibleError("not enough eligible targets: need " + std::to_string(opt.n_targets) +
                              ", have " + std::to_string(pool.size()));
    std::vector<NodePair> targets = pool;
    std::mt19937_64 rng(derive_seed(opt.root_seed, {0x7a46e7}));
    std::shuffle(targets.begin(), targets.end(), rng);
    targets.resize(static_cast<std::size_t>(opt.n_targets));

    EvaluationReport rep;
    rep.method = prox.method;
    rep.attack = attack;
    rep.action = spec_template.action;
    rep.budgets = budgets;
    rep.per_seed.assign(budgets.size(), {});
    rep.per_seed_inner.assign(budgets.size(), {});

    std::vector<std::vector<std::vector<double>>> cos_cells(
        budgets.size(), std::vector<std::vector<double>>(targets.size()));
    auto inner_cells = cos_cells;
    std::atomic<int> failures{0};

    const int cells = static_cast<int>(budgets.size() * targets.size()) * opt.n_seeds;
    detail::parallel_for(cells, opt.workers, [&](int cell) {
        const int s = cell % opt.n_seeds;
        const int ti = (cell / opt.n_seeds) % static_cast<int>(targets.size());
        const int bi = cell / (opt.n_seeds * static_cast<int>(targets.size()));
        std::uint64_t seed = derive_seed(opt.root_seed, {3, static_cast<std::uint64_t>(bi),
                                                         static_cast<std::uint64_t>(ti),
                                                         static_cast<std::uint64_t>(s)});
        AttackSpec aspec = spec_template;
        aspec.goal = Goal::integrity;
        aspec.target = targets[static_cast<std::size_t>(ti)];
        aspec.budget = budgets[static_cast<std::size_t>(bi)];
        try {
            Embedding clean = factorize(build_Z(split.train_graph, prox), derive_seed(seed, {4}), opt.als);
            double cos0 = cosine_scores(clean, {aspec.target})[0];
            double inner0 = inner_product_scores(clean, {aspec.target})[0];
            double cos1 = cos0, inner1 = inner0;
            if (aspec.budget > 0) {
                Perturbation p = detail::run_attack(split.train_graph, aspec, prox, attack, seed, opt);
                Graph poisoned = apply_perturbation(split.train_graph, p);
                Embedding emb = factorize(build_Z(poisoned, prox), derive_seed(seed, {4}), opt.als);
                cos1 = cosine_scores(emb, {aspec.target})[0];
                inner1 = inner_product_scores(emb, {aspec.target})[0];
            }
            cos_cells[static_cast<std::size_t>(bi)][static_cast<std::size_t>(ti)].push_back(cos1 - cos0);
            inner_cells[static_cast<std::size_t>(bi)][static_cast<std::size_t>(ti)].push_back(inner1 -
                                                                                              inner0);
        } catch (const InfeasibleError&) {
            ++failures;
        }
    });

    for (std::size_t bi = 0; bi < budgets.size(); ++bi)
        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
            auto& cos_out = rep.per_seed[bi];
            cos_out.insert(cos_out.end(), cos_cells[bi][ti].begin(), cos_cells[bi][ti].end());
            auto& in_out = rep.per_seed_inner[bi];
            in_out.insert(in_out.end(), inner_cells[bi][ti].begin(), inner_cells[bi][ti].end());
        }
    rep.failed_targets = failures.load();
    detail::finalize_curve(rep);
    return rep;
}

/// Transfer protocol: the perturbation is computed against `source`, the AP
/// is measured under a `target`-method embedding of the poisoned graph.
inline EvaluationReport run_transfer_experiment(const LinkSplit& split, const ProximitySpec& source,
                                                const ProximitySpec& target, const std::string& attack,
                                                Perturbation::Action action,
                                                const std::vector<int>& budgets,
                                                const ExperimentOptions& opt) {
    EvaluationReport rep;
    rep.method = target.method;
    rep.attack = attack;
    rep.action = action;
    rep.budgets = budgets;
    rep.per_seed.assign(budgets.size(), std::vector<double>(static_cast<std::size_t>(opt.n_seeds)));

    {
        double clean = 0.0;
        for (int s = 0; s < opt.n_seeds; ++s)
            clean += detail::availability_ap(split.train_graph, split, target,
                                             derive_seed(opt.root_seed, {0xc1ea, static_cast<std::uint64_t>(s)}),
                                             opt.als);
        rep.baseline_clean = clean / std::max(1, opt.n_seeds);
    }

    const int cells = static_cast<int>(budgets.size()) * opt.n_seeds;
    detail::parallel_for(cells, opt.workers, [&](int cell) {
        const int bi = cell / opt.n_seeds;
        const int s = cell % opt.n_seeds;
        std::uint64_t seed = derive_seed(opt.root_seed, {5, static_cast<std::uint64_t>(bi),
                                                         static_cast<std::uint64_t>(s)});
        int budget = budgets[static_cast<std::size_t>(bi)];
        Graph poisoned = split.train_graph;
        if (budget > 0) {
            AttackSpec aspec = detail::availability_spec(split, action, budget, opt);
            Perturbation p = detail::run_attack(split.train_graph, aspec, source, attack, seed, opt);
            poisoned = apply_perturbation(split.train_graph, p);
        }
        rep.per_seed[static_cast<std::size_t>(bi)][static_cast<std::size_t>(s)] =
            detail::availability_ap(poisoned, split, target, derive_seed(seed, {2}), opt.als);
    });
    detail::finalize_curve(rep);
    return rep;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
    return nlohmann::json{{"method", to_string(r.method)},
                          {"attack", r.attack},
                          {"action", to_string(r.action)},
                          {"budgets", r.budgets},
                          {"metric_curve", r.metric_curve},
                          {"per_seed", r.per_seed},
                          {"per_seed_inner", r.per_seed_inner},
                          {"baseline_clean", r.baseline_clean},
                          {"failed_targets", r.failed_targets}};
}

inline std::string to_csv(const EvaluationReport& r) {
    std::ostringstream out;
    out << "attack,method,action,budget,sample,value\n";
    for (std::size_t bi = 0; bi < r.budgets.size(); ++bi)
        for (std::size_t s = 0; s < r.per_seed[bi].size(); ++s)
            out << r.attack << ',' << to_string(r.method) << ',' << to_string(r.action) << ','
                << r.budgets[bi] << ',' << s << ',' << r.per_seed[bi][s] << '\n';
    return out.str();
}

}  // namespace graphpoison
