#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "graphpoison/sbm.hpp"
#include "graphpoison/split.hpp"
#include "test_util.hpp"

using namespace graphpoison;

namespace {

void check_invariants(const Graph& g, const LinkSplit& s) {
    const int removed = static_cast<int>(s.test_pos.size() + s.val_pos.size());
    CHECK(g.num_edges() - s.train_graph.num_edges() == removed);
    CHECK(s.test_neg.size() == s.test_pos.size());
    CHECK(s.val_neg.size() == s.val_pos.size());
    // 2:1 test/validation up to rounding
    CHECK(std::abs(static_cast<int>(s.test_pos.size()) - 2 * static_cast<int>(s.val_pos.size())) <= 2);

    std::set<NodePair> all;
    for (const auto* list : {&s.test_pos, &s.test_neg, &s.val_pos, &s.val_neg})
        for (NodePair e : *list) CHECK(all.insert(e).second);

    for (NodePair e : s.test_pos) {
        CHECK(g.has_edge(e.first, e.second));
        CHECK(!s.train_graph.has_edge(e.first, e.second));
    }
    for (NodePair e : s.val_pos) CHECK(g.has_edge(e.first, e.second));
    for (NodePair e : s.test_neg) CHECK(!g.has_edge(e.first, e.second));
    for (NodePair e : s.val_neg) CHECK(!g.has_edge(e.first, e.second));
    CHECK(s.train_graph.min_degree() >= 1);
}

}  // namespace

TEST_CASE("split_links on a small graph") {
    // 4-cycle plus chord: 5 edges, holdout 0.2 removes exactly one.
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
    LinkSplit s = split_links(g, 0.2, 7);
    CHECK(s.test_pos.size() + s.val_pos.size() == 1);
    check_invariants(g, s);
}

TEST_CASE("split_links removes round(frac * |E|) positives") {
    Graph g = generate_sbm(120, 3, 0.2, 0.02, 5);
    LinkSplit s = split_links(g, 0.15, 42);
    int expected = static_cast<int>(std::lround(0.15 * g.num_edges()));
    CHECK(static_cast<int>(s.test_pos.size() + s.val_pos.size()) == expected);
    check_invariants(g, s);
}

TEST_CASE("split_links is deterministic per seed") {
    Graph g = generate_sbm(60, 2, 0.25, 0.05, 9);
    LinkSplit a = split_links(g, 0.15, 123);
    LinkSplit b = split_links(g, 0.15, 123);
    CHECK(a.train_graph.edges() == b.train_graph.edges());
    CHECK(a.test_pos == b.test_pos);
    CHECK(a.test_neg == b.test_neg);
    CHECK(a.val_pos == b.val_pos);
    CHECK(a.val_neg == b.val_neg);
    LinkSplit c = split_links(g, 0.15, 124);
    CHECK(a.test_pos != c.test_pos);
}

TEST_CASE("split_links preserves min degree across many seeds and graphs") {
    for (std::uint64_t gs : {1ULL, 2ULL, 3ULL}) {
        Graph g = generate_sbm(80, 2, 0.15, 0.03, gs);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            LinkSplit s = split_links(g, 0.15, seed);
            REQUIRE(s.train_graph.min_degree() >= 1);
        }
    }
}

TEST_CASE("split_links rejects impossible requests") {
    SECTION("bad fraction") {
        CHECK_THROWS_AS(split_links(gp_test::complete(5), 1.5, 1), ConfigError);
        CHECK_THROWS_AS(split_links(gp_test::complete(5), 0.0, 1), ConfigError);
    }
    SECTION("triangle has no non-edges to sample") {
        CHECK_THROWS_AS(split_links(gp_test::triangle(), 0.34, 7), InfeasibleError);
    }
    SECTION("star cannot lose edges without isolating a leaf") {
        CHECK_THROWS_AS(split_links(gp_test::star(10), 0.5, 3), InfeasibleError);
    }
}

TEST_CASE("LinkSplit JSON round-trip") {
    Graph g = generate_sbm(40, 2, 0.3, 0.05, 4);
    LinkSplit s = split_links(g, 0.15, 17);
    LinkSplit r = split_from_json(to_json(s));
    CHECK(r.train_graph.edges() == s.train_graph.edges());
    CHECK(r.test_pos == s.test_pos);
    CHECK(r.test_neg == s.test_neg);
    CHECK(r.val_pos == s.val_pos);
    CHECK(r.val_neg == s.val_neg);
    CHECK(r.seed == s.seed);
}
