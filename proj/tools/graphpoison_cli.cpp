// Command-line front end: split / attack / evaluate / gen-sbm subcommands.
// Exit codes: 0 success, 2 configuration error, 3 infeasible request,
// 4 numeric failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphpoison/graphpoison.hpp"

using namespace graphpoison;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

NodePair parse_pair(const std::string& s) {
    std::istringstream in(s);
    int u, v;
    char comma;
    if (!(in >> u >> comma >> v) || comma != ',' || (in >> std::ws, !in.eof()))
        throw ConfigError("expected 'u,v' but got '" + s + "'");
    return {u, v};
}

LinkSplit read_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open split file " + path);
    nlohmann::json j;
    in >> j;
    return split_from_json(j);
}

struct ProximityFlags {
    std::string method = "deepwalk";
    int window = 5;
    double neg = 1.0;
    int dim = 32;

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "embedding method: deepwalk or line2")
            ->check(CLI::IsMember({"deepwalk", "line2", "line"}));
        cmd->add_option("--window", window, "walk window T (deepwalk)");
        cmd->add_option("--neg", neg, "negative-sample count b");
        cmd->add_option("--dim", dim, "embedding dimension d");
    }
    ProximitySpec spec() const { return {method_from_string(method), window, neg, dim}; }
};

int cmd_split(const std::string& graph_path, double holdout, std::uint64_t seed,
              const std::string& out_path) {
    Graph g = load_edge_list(graph_path);
    LinkSplit split = split_links(g, holdout, seed);
    write_text(out_path, to_json(split).dump(2) + "\n");
    std::cout << "nodes " << g.num_nodes() << "  train_edges " << split.train_graph.num_edges()
              << "  test_pos " << split.test_pos.size() << "  test_neg " << split.test_neg.size()
              << "  val_pos " << split.val_pos.size() << "  val_neg " << split.val_neg.size() << "\n";
    return 0;
}

nlohmann::json perturbation_json(const Perturbation& p) {
    return nlohmann::json{{"action", to_string(p.action)},
                          {"edits", pairs_to_json(p.edits)},
                          {"scores", p.scores}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-poisoning attacks on factorization-based node embeddings"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a TOML/INI config file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // --- split ---
    auto* split_cmd = app.add_subcommand("split", "hold out test/validation links");
    std::string split_graph, split_out = "split.json";
    double holdout = 0.15;
    std::uint64_t split_seed = 1;
    split_cmd->add_option("--graph", split_graph, "edge-list file")->required();
    split_cmd->add_option("--holdout", holdout, "fraction of edges to hold out");
    split_cmd->add_option("--seed", split_seed, "rng seed");
    split_cmd->add_option("--out", split_out, "output split JSON");

    // --- attack ---
    auto* attack_cmd = app.add_subcommand("attack", "compute a poisoning perturbation");
    std::string atk_graph, atk_split, atk_out = "attack.json";
    std::string atk_name = "opt", goal = "integrity", target_str, direction = "up";
    std::string constraint = "none", action = "add";
    ProximityFlags atk_prox;
    int budget = 1, iters = 50, refactor_every = 1;
    double step = 1.0, eps_init = 1e-3, ppr_restart = 0.15;
    std::uint64_t atk_seed = 1;
    attack_cmd->add_option("--graph", atk_graph, "edge-list file to poison");
    attack_cmd->add_option("--split", atk_split,
                           "split JSON; supplies the train graph and availability targets");
    atk_prox.attach(attack_cmd);
    attack_cmd->add_option("--attack", atk_name, "opt | random | ppr | degree_sum | shortest_path");
    attack_cmd->add_option("--goal", goal, "integrity or availability")
        ->check(CLI::IsMember({"integrity", "availability"}));
    attack_cmd->add_option("--target", target_str, "integrity target pair 'u,v'");
    attack_cmd->add_option("--direction", direction, "integrity direction")
        ->check(CLI::IsMember({"up", "down"}));
    attack_cmd->add_option("--constraint", constraint, "direct | indirect | none")
        ->check(CLI::IsMember({"direct", "indirect", "none"}));
    attack_cmd->add_option("--action", action, "add or delete")
        ->check(CLI::IsMember({"add", "delete"}));
    attack_cmd->add_option("--budget", budget, "number of edge edits");
    attack_cmd->add_option("--iters", iters, "pgd iterations");
    attack_cmd->add_option("--step", step, "pgd base step size");
    attack_cmd->add_option("--refactor-every", refactor_every, "re-factorize every k iterations");
    attack_cmd->add_option("--epsilon", eps_init, "initial weight on modifiable zero cells");
    attack_cmd->add_option("--ppr-restart", ppr_restart, "ppr restart probability");
    attack_cmd->add_option("--seed", atk_seed, "rng seed");
    attack_cmd->add_option("--out", atk_out, "output perturbation JSON");

    // --- evaluate ---
    auto* eval_cmd = app.add_subcommand("evaluate", "run an experiment over budgets and seeds");
    std::string ev_split, ev_out = "report";
    std::string experiment = "availability", ev_attack = "opt", ev_action = "add";
    std::string ev_direction = "up", ev_constraint = "none", transfer_target = "line2";
    ProximityFlags ev_prox;
    std::vector<int> budgets{25, 50, 100, 150, 200, 250, 300};
    int n_seeds = 5, n_targets = 8, workers = 1, ev_iters = 30, ev_refactor = 1;
    double ev_step = 1.0, ev_eps = 1e-3, ev_restart = 0.15;
    std::uint64_t ev_seed = 1;
    eval_cmd->add_option("--split", ev_split, "split JSON")->required();
    ev_prox.attach(eval_cmd);
    eval_cmd->add_option("--experiment", experiment, "availability | integrity | transfer")
        ->check(CLI::IsMember({"availability", "integrity", "transfer"}));
    eval_cmd->add_option("--attack", ev_attack, "attack or baseline name");
    eval_cmd->add_option("--action", ev_action, "add or delete")
        ->check(CLI::IsMember({"add", "delete"}));
    eval_cmd->add_option("--direction", ev_direction, "integrity direction")
        ->check(CLI::IsMember({"up", "down"}));
    eval_cmd->add_option("--constraint", ev_constraint, "integrity constraint")
        ->check(CLI::IsMember({"direct", "indirect", "none"}));
    eval_cmd->add_option("--transfer-target", transfer_target, "target method for transfer runs")
        ->check(CLI::IsMember({"deepwalk", "line2", "line"}));
    eval_cmd->add_option("--budgets", budgets, "budget grid");
    eval_cmd->add_option("--seeds", n_seeds, "seeds per cell");
    eval_cmd->add_option("--targets", n_targets, "integrity targets");
    eval_cmd->add_option("--workers", workers, "max concurrent cells");
    eval_cmd->add_option("--iters", ev_iters, "pgd iterations");
    eval_cmd->add_option("--step", ev_step, "pgd base step size");
    eval_cmd->add_option("--refactor-every", ev_refactor, "re-factorize every k iterations");
    eval_cmd->add_option("--epsilon", ev_eps, "initial weight on modifiable zero cells");
    eval_cmd->add_option("--ppr-restart", ev_restart, "ppr restart probability");
    eval_cmd->add_option("--seed", ev_seed, "root rng seed");
    eval_cmd->add_option("--out", ev_out, "output path prefix (.json/.csv appended)");

    // --- gen-sbm ---
    auto* sbm_cmd = app.add_subcommand("gen-sbm", "write a synthetic block-model edge list");
    int sbm_n = 500, sbm_blocks = 2;
    double p_in = 0.05, p_out = 0.005;
    std::uint64_t sbm_seed = 1;
    std::string sbm_out = "sbm.edges";
    sbm_cmd->add_option("--nodes", sbm_n, "node count");
    sbm_cmd->add_option("--blocks", sbm_blocks, "community count");
    sbm_cmd->add_option("--p-in", p_in, "within-block edge probability");
    sbm_cmd->add_option("--p-out", p_out, "cross-block edge probability");
    sbm_cmd->add_option("--seed", sbm_seed, "rng seed");
    sbm_cmd->add_option("--out", sbm_out, "output edge-list path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*split_cmd) return cmd_split(split_graph, holdout, split_seed, split_out);

        if (*attack_cmd) {
            Graph g;
            LinkSplit split;
            bool have_split = !atk_split.empty();
            if (have_split) {
                split = read_split(atk_split);
                g = split.train_graph;
            } else if (!atk_graph.empty()) {
                g = load_edge_list(atk_graph);
            } else {
                throw ConfigError("attack needs --graph or --split");
            }

            AttackSpec spec;
            spec.goal = goal == "integrity" ? Goal::integrity : Goal::availability;
            spec.action = action_from_string(action);
            spec.constraint = constraint_from_string(constraint);
            spec.budget = budget;
            spec.step_size = step;
            spec.iterations = iters;
            spec.epsilon_init = eps_init;
            spec.refactor_every = refactor_every;
            if (spec.goal == Goal::integrity) {
                if (target_str.empty()) throw ConfigError("integrity attack needs --target u,v");
                spec.target = parse_pair(target_str);
                spec.direction = direction == "up" ? Direction::up : Direction::down;
            } else {
                if (!have_split) throw ConfigError("availability attack needs --split for its targets");
                spec.target_pos = split.test_pos;
                spec.target_neg = split.test_neg;
            }

            auto t0 = std::chrono::steady_clock::now();
            Perturbation p;
            std::vector<double> loss_trace;
            if (atk_name == "opt") {
                RelaxedAdjacency relaxed = pgd(g, spec, atk_prox.spec(), atk_seed);
                loss_trace = relaxed.loss_trace;
                p = project_discrete(relaxed, spec);
            } else if (atk_name == "random") {
                p = random_attack(g, spec, atk_seed);
            } else if (atk_name == "ppr") {
                p = ppr_attack(g, spec, ppr_restart);
            } else if (atk_name == "degree_sum") {
                p = degree_sum_attack(g, spec);
            } else if (atk_name == "shortest_path") {
                p = shortest_path_attack(g, spec);
            } else {
                throw ConfigError("unknown attack '" + atk_name + "'");
            }
            double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            nlohmann::json out{{"spec", to_json(spec)},
                               {"attack", atk_name},
                               {"method", atk_prox.method},
                               {"seed", atk_seed},
                               {"loss_trace", loss_trace},
                               {"wall_time", wall},
                               {"perturbation", perturbation_json(p)}};
            write_text(atk_out, out.dump(2) + "\n");
            std::cout << "wrote " << p.edits.size() << " edits to " << atk_out << " ("
                      << wall << " s)\n";
            return 0;
        }

        if (*eval_cmd) {
            LinkSplit split = read_split(ev_split);
            ExperimentOptions opt;
            opt.n_seeds = n_seeds;
            opt.n_targets = n_targets;
            opt.root_seed = ev_seed;
            opt.workers = workers;
            opt.iterations = ev_iters;
            opt.step_size = ev_step;
            opt.epsilon_init = ev_eps;
            opt.refactor_every = ev_refactor;
            opt.ppr_restart = ev_restart;

            EvaluationReport rep;
            if (experiment == "availability") {
                rep = run_availability_experiment(split, ev_prox.spec(), ev_attack,
                                                  action_from_string(ev_action), budgets, opt);
            } else if (experiment == "integrity") {
                AttackSpec tmpl;
                tmpl.goal = Goal::integrity;
                tmpl.direction = ev_direction == "up" ? Direction::up : Direction::down;
                tmpl.constraint = constraint_from_string(ev_constraint);
                tmpl.action = action_from_string(ev_action);
                tmpl.step_size = ev_step;
                tmpl.iterations = ev_iters;
                tmpl.epsilon_init = ev_eps;
                tmpl.refactor_every = ev_refactor;
                rep = run_integrity_experiment(split, ev_prox.spec(), ev_attack, tmpl, budgets, opt);
            } else {
                ProximitySpec target = ev_prox.spec();
                target.method = method_from_string(transfer_target);
                rep = run_transfer_experiment(split, ev_prox.spec(), target, ev_attack,
                                              action_from_string(ev_action), budgets, opt);
            }

            nlohmann::json out = to_json(rep);
            out["config"] = {{"experiment", experiment}, {"seed", ev_seed},
                             {"seeds", n_seeds},        {"targets", n_targets},
                             {"method", ev_prox.method}, {"dim", ev_prox.dim},
                             {"window", ev_prox.window}, {"neg", ev_prox.neg}};
            write_text(ev_out + ".json", out.dump(2) + "\n");
            write_text(ev_out + ".csv", to_csv(rep));
            std::cout << "wrote " << ev_out << ".json and " << ev_out << ".csv\n";
            return 0;
        }

        if (*sbm_cmd) {
            Graph g = generate_sbm(sbm_n, sbm_blocks, p_in, p_out, sbm_seed);
            std::ostringstream out;
            for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
            write_text(sbm_out, out.str());
            std::cout << "wrote " << g.num_nodes() << " nodes / " << g.num_edges() << " edges to "
                      << sbm_out << "\n";
            return 0;
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.max_feasible > 0) std::cerr << "max feasible budget: " << e.max_feasible << "\n";
        return kExitInfeasible;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
