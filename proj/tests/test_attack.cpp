#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "graphpoison/attack.hpp"
#include "graphpoison/sbm.hpp"
#include "test_util.hpp"

using namespace graphpoison;

namespace {

AttackSpec integrity_spec(NodePair target, Direction dir, Perturbation::Action action,
                          Constraint constraint = Constraint::none) {
    AttackSpec s;
    s.goal = Goal::integrity;
    s.target = target;
    s.direction = dir;
    s.action = action;
    s.constraint = constraint;
    return s;
}

}  // namespace

TEST_CASE("frozen mask: direct constraint") {
    AttackSpec s = integrity_spec({1, 3}, Direction::up, Perturbation::Action::add, Constraint::direct);
    BoolArray frozen = frozen_mask(6, s);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) {
                CHECK(frozen(i, j));
            } else if ((i == 1 && j == 3) || (i == 3 && j == 1)) {
                CHECK(frozen(i, j));  // target always frozen
            } else if (i == 1 || i == 3 || j == 1 || j == 3) {
                CHECK(!frozen(i, j));
            } else {
                CHECK(frozen(i, j));
            }
        }
}

TEST_CASE("frozen mask: indirect constraint freezes incident cells") {
    AttackSpec s = integrity_spec({0, 2}, Direction::down, Perturbation::Action::remove, Constraint::indirect);
    BoolArray frozen = frozen_mask(5, s);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            bool incident = i == 0 || i == 2 || j == 0 || j == 2;
            if (i != j && !incident) CHECK(!frozen(i, j));
            if (incident) CHECK(frozen(i, j));
        }
}

TEST_CASE("frozen mask: availability freezes every target pair") {
    AttackSpec s;
    s.goal = Goal::availability;
    s.target_pos = {{0, 1}};
    s.target_neg = {{2, 3}};
    BoolArray frozen = frozen_mask(5, s);
    CHECK(frozen(0, 1));
    CHECK(frozen(1, 0));
    CHECK(frozen(2, 3));
    CHECK(!frozen(0, 2));
    CHECK(!frozen(1, 4));
}

TEST_CASE("pgd with zero iterations returns the initial surface") {
    Graph g = gp_test::random_connected(8, 0.4, 3);
    AttackSpec s = integrity_spec({0, 1}, Direction::up, Perturbation::Action::add);
    s.iterations = 0;
    s.epsilon_init = 1e-3;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 2}, 1);
    CHECK(r.loss_trace.empty());
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (i == j) {
                CHECK(r.W(i, j) == 0.0);
            } else if (r.frozen(i, j)) {
                CHECK(r.W(i, j) == r.A_org(i, j));
            } else if (r.A_org(i, j) == 0.0) {
                CHECK(r.W(i, j) == 1e-3);
            } else {
                CHECK(r.W(i, j) == 1.0);
            }
        }
}

TEST_CASE("pgd under delete does not seed epsilon on zero cells") {
    Graph g = gp_test::random_connected(8, 0.4, 3);
    AttackSpec s = integrity_spec({0, 1}, Direction::down, Perturbation::Action::remove);
    s.iterations = 0;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 2}, 1);
    CHECK(r.W == r.A_org);
}

TEST_CASE("pgd output: frozen cells bit-exact, symmetric, zero diagonal, in box") {
    Graph g = generate_sbm(30, 2, 0.3, 0.06, 5);
    AttackSpec s = integrity_spec({0, 17}, Direction::up, Perturbation::Action::add);
    s.iterations = 8;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::deepwalk, 2, 1.0, 4}, 9);
    CHECK((r.W - r.W.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.W.diagonal().isZero());
    CHECK(r.W.minCoeff() >= 0.0);
    CHECK(r.W.maxCoeff() <= 1.0);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j)
            if (r.frozen(i, j)) CHECK(r.W(i, j) == r.A_org(i, j));
    CHECK(r.loss_trace.size() == 9);  // one per iteration plus the final refresh
}

TEST_CASE("direct-constraint pgd only moves cells incident to the target") {
    Graph g = gp_test::random_connected(12, 0.35, 8);
    NodePair target{2, 9};
    if (g.has_edge(2, 9)) {
        // pick a non-edge target instead
        for (int i = 0; i < 12 && g.has_edge(target.first, target.second); ++i)
            for (int j = i + 1; j < 12; ++j)
                if (!g.has_edge(i, j)) target = {i, j};
    }
    AttackSpec s = integrity_spec(target, Direction::up, Perturbation::Action::add, Constraint::direct);
    s.iterations = 5;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 3}, 4);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            bool incident = i == target.first || i == target.second || j == target.first ||
                            j == target.second;
            if (!incident || (ordered(i, j) == ordered(target.first, target.second)))
                CHECK(r.W(i, j) == r.A_org(i, j));
        }
}

TEST_CASE("pgd loss trace trends downward on a synthetic graph") {
    Graph g = generate_sbm(50, 2, 0.25, 0.05, 12);
    AttackSpec s;
    s.goal = Goal::availability;
    for (int k = 0; k < 10; ++k) s.target_pos.push_back(g.edges()[static_cast<std::size_t>(k * 3)]);
    s.target_neg = {{0, 40}, {1, 45}, {3, 48}};
    s.action = Perturbation::Action::add;
    s.iterations = 20;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::deepwalk, 2, 1.0, 8}, 33);
    REQUIRE(r.loss_trace.size() >= 20);
    // compare mean of the first and last windows of 10 iterations
    double head = std::accumulate(r.loss_trace.begin(), r.loss_trace.begin() + 10, 0.0) / 10.0;
    double tail = std::accumulate(r.loss_trace.end() - 10, r.loss_trace.end(), 0.0) / 10.0;
    CHECK(tail <= head);
}

TEST_CASE("project_discrete: epsilon ties resolve lexicographically") {
    Graph g = gp_test::path(4);  // non-edges: (0,2),(0,3),(1,3)
    AttackSpec s = integrity_spec({0, 1}, Direction::up, Perturbation::Action::add);
    s.iterations = 0;
    s.budget = 2;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 2}, 1);
    Perturbation p = project_discrete(r, s);
    REQUIRE(p.edits.size() == 2);
    CHECK(p.edits[0] == NodePair{0, 2});
    CHECK(p.edits[1] == NodePair{0, 3});
}

TEST_CASE("project_discrete: the cell driven closest to 1 wins") {
    Graph g = gp_test::path(5);
    AttackSpec s = integrity_spec({0, 1}, Direction::up, Perturbation::Action::add);
    s.iterations = 0;
    s.budget = 1;
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 2}, 1);
    r.W(1, 4) = r.W(4, 1) = 0.99;
    Perturbation p = project_discrete(r, s);
    REQUIRE(p.edits.size() == 1);
    CHECK(p.edits[0] == NodePair{1, 4});
    CHECK(p.scores[0] == 0.99);
}

TEST_CASE("project_discrete: delete picks cells closest to 0 and avoids isolation") {
    Graph g = gp_test::star(5);  // deleting any spoke isolates a leaf
    AttackSpec s;
    s.goal = Goal::availability;
    s.target_pos = {};
    s.target_neg = {};
    s.action = Perturbation::Action::remove;
    s.budget = 1;
    RelaxedAdjacency r;
    r.A_org = g.adjacency();
    r.frozen = frozen_mask(5, s);
    r.W = r.A_org;
    r.W(0, 1) = r.W(1, 0) = 0.05;  // most attractive deletion, but isolating
    CHECK_THROWS_AS(project_discrete(r, s), InfeasibleError);

    // Add a rescue edge so leaf 1 survives; now (0,1) is deletable.
    Graph g2(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}});
    r.A_org = g2.adjacency();
    r.W = r.A_org;
    r.W(0, 1) = r.W(1, 0) = 0.05;
    r.W(0, 4) = r.W(4, 0) = 0.01;  // even better, but would isolate node 4
    Perturbation p = project_discrete(r, s);
    REQUIRE(p.edits.size() == 1);
    CHECK(p.edits[0] == NodePair{0, 1});
}

TEST_CASE("project_discrete reports the max feasible budget") {
    Graph g = gp_test::path(3);
    AttackSpec s = integrity_spec({0, 1}, Direction::up, Perturbation::Action::add);
    s.iterations = 0;
    s.budget = 5;  // only (0,2) and (1,... ) minus frozen target leave 2 candidates
    RelaxedAdjacency r = pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 1}, 1);
    try {
        project_discrete(r, s);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.max_feasible == 1);  // (0,2) only: (0,1) frozen target, (1,2) is an edge
    }
}

TEST_CASE("pgd validates its configuration") {
    Graph g = gp_test::triangle();
    AttackSpec s = integrity_spec({0, 7}, Direction::up, Perturbation::Action::add);
    CHECK_THROWS_AS(pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 1}, 1), ConfigError);
    s = integrity_spec({0, 1}, Direction::up, Perturbation::Action::add);
    s.refactor_every = 0;
    CHECK_THROWS_AS(pgd(g, s, ProximitySpec{Method::line2, 1, 1.0, 1}, 1), ConfigError);
}
