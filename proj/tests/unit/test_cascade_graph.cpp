#include <doctest.h>

#include <algorithm>
#include <random>

#include "cgf/cascade_graph.hpp"
#include "cgf/errors.hpp"
#include "fixtures.hpp"

using namespace cgf;

namespace {

std::vector<Label> in_labels_1based(const CascadeGraph& cg, Label one_based) {
    std::vector<Label> out;
    for (Label l : cg.in_edges(one_based - 1)) {
        out.push_back(l + 1);
    }
    return out;
}

} // namespace

TEST_CASE("fig1 cascade graph edges and seeds") {
    auto f = fixtures::fig1();
    auto cg = build_cascade_graph(f.graph, f.log);
    REQUIRE(cg.size() == 7);
    CHECK(cg.node_id(0) == 501);
    CHECK(cg.node_id(6) == 105);
    CHECK(in_labels_1based(cg, 1).empty());
    CHECK(in_labels_1based(cg, 2).empty());
    CHECK(in_labels_1based(cg, 3) == std::vector<Label>{1});
    CHECK(in_labels_1based(cg, 4) == std::vector<Label>{1, 2});
    CHECK(in_labels_1based(cg, 5) == std::vector<Label>{2});
    CHECK(in_labels_1based(cg, 6) == std::vector<Label>{1, 3});
    CHECK(in_labels_1based(cg, 7) == std::vector<Label>{1});
    CHECK(cg.edge_count() == 7);
    CHECK(std::vector<Label>(cg.seeds().begin(), cg.seeds().end()) == std::vector<Label>{0, 1});
    CHECK(cg.seed_index(1) == 1u);
    CHECK_FALSE(cg.seed_index(3).has_value());
}

TEST_CASE("single activation is its own seed") {
    FollowerGraph g;
    g.add_node(42);
    auto cg = build_cascade_graph(g, {"s", {{42, 0.0}}});
    CHECK(cg.size() == 1);
    CHECK(cg.seeds().size() == 1);
    CHECK(cg.edge_count() == 0);
}

TEST_CASE("equal timestamps suppress edges in both directions") {
    FollowerGraph g;
    g.add_edge(1, 2);
    g.add_edge(2, 1);
    auto cg = build_cascade_graph(g, {"s", {{2, 5.0}, {1, 5.0}}});
    CHECK(cg.edge_count() == 0);
    CHECK(cg.seeds().size() == 2);
    // ties ordered by node id
    CHECK(cg.node_id(0) == 1);
}

TEST_CASE("whole tie groups are edge-free") {
    FollowerGraph g;
    g.add_edge(2, 1);
    g.add_edge(3, 2);
    g.add_edge(3, 1);
    g.add_edge(4, 3);
    auto cg = build_cascade_graph(g, {"s", {{1, 0.0}, {2, 1.0}, {3, 1.0}, {4, 2.0}}});
    CHECK(in_labels_1based(cg, 3) == std::vector<Label>{1});
    CHECK(in_labels_1based(cg, 4) == std::vector<Label>{3});
}

TEST_CASE("ingestion errors") {
    FollowerGraph g;
    g.add_edge(1, 2);
    SUBCASE("duplicate activation") {
        CHECK_THROWS_AS(build_cascade_graph(g, {"s", {{1, 0.0}, {1, 1.0}}}), InputError);
    }
    SUBCASE("unknown node in strict mode names the node") {
        try {
            build_cascade_graph(g, {"s", {{1, 0.0}, {99, 1.0}}}, {.strict = true});
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("99") != std::string::npos);
        }
    }
    SUBCASE("unknown node is an isolated seed by default") {
        auto cg = build_cascade_graph(g, {"s", {{2, 0.0}, {99, 1.0}}});
        CHECK(cg.seeds().size() == 2);
    }
    SUBCASE("self loop") { CHECK_THROWS_AS(g.add_edge(3, 3), InputError); }
    SUBCASE("duplicate follower edge is ignored") {
        CHECK_FALSE(g.add_edge(1, 2));
        CHECK(g.edge_count() == 1);
    }
}

TEST_CASE("classify seeds") {
    SUBCASE("fig1: both seeds active") {
        auto f = fixtures::fig1();
        auto s = classify_seeds(build_cascade_graph(f.graph, f.log));
        CHECK(s.active == std::vector<Label>{0, 1});
        CHECK(s.trivial.empty());
    }
    SUBCASE("isolated voter") {
        FollowerGraph g;
        auto s = classify_seeds(build_cascade_graph(g, {"s", {{7, 0.0}}}));
        CHECK(s.active.empty());
        CHECK(s.trivial == std::vector<Label>{0});
    }
    SUBCASE("star plus a late disconnected voter") {
        auto f = fixtures::star6();
        f.log.records.push_back({77, 100.0});
        auto cg = build_cascade_graph(f.graph, f.log);
        auto s = classify_seeds(cg);
        // oracle: out-degree inspection
        std::vector<Label> active, trivial;
        for (Label l : cg.seeds()) {
            (cg.out_edges(l).empty() ? trivial : active).push_back(l);
        }
        CHECK(s.active == active);
        CHECK(s.trivial == trivial);
        CHECK(s.active == std::vector<Label>{0});
        CHECK(s.trivial == std::vector<Label>{6});
    }
}

TEST_CASE("reversed edge convention yields the same cascade graph") {
    auto f = fixtures::fig1();
    FollowerGraph reversed;
    // rebuild from (friend, fan) pairs read with the swapped convention
    for (NodeId fan : {333, 120, 918, 444, 105, 501, 207, 700, 701}) {
        for (NodeId fr : f.graph.friends_of(fan)) {
            reversed.add_edge(fr, fan, EdgeConvention::FriendToFan);
        }
    }
    CHECK(build_cascade_graph(reversed, f.log) == build_cascade_graph(f.graph, f.log));
}

TEST_CASE("DAG and tie invariants on random logs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        FollowerGraph g;
        const int n = 30;
        std::uniform_int_distribution<int> node(1, n);
        for (int e = 0; e < 120; ++e) {
            int a = node(rng), b = node(rng);
            if (a != b) {
                g.add_edge(a, b);
            }
        }
        ActivationLog log{"r", {}};
        std::uniform_int_distribution<int> t(0, 10);  // many ties
        for (int i = 1; i <= n; ++i) {
            log.records.push_back({static_cast<NodeId>(i), static_cast<double>(t(rng))});
        }
        auto cg = build_cascade_graph(g, log);
        REQUIRE(cg.size() == static_cast<std::size_t>(n));
        CHECK(cg.seeds().size() >= 1);
        CHECK(cg.seeds()[0] == 0);
        for (std::size_t i = 0; i < cg.size(); ++i) {
            for (Label j : cg.in_edges(static_cast<Label>(i))) {
                CHECK(j < i);
                CHECK(cg.timestamp(j) < cg.timestamp(static_cast<Label>(i)));
            }
            CHECK(cg.in_edges(static_cast<Label>(i)).empty() == cg.seed_index(static_cast<Label>(i)).has_value());
        }
        auto s = classify_seeds(cg);
        CHECK(s.active.size() + s.trivial.size() == cg.seeds().size());
    }
}

TEST_CASE("from_in_edges validates") {
    CHECK_THROWS_AS(CascadeGraph::from_in_edges({1, 2}, {0, 1}, {{}, {1}}), InputError);
    CHECK_THROWS_AS(CascadeGraph::from_in_edges({1, 2}, {0, 0}, {{}, {0}}), InputError);
    auto cg = CascadeGraph::from_in_edges({1, 2}, {0, 1}, {{}, {0}});
    CHECK(cg.out_edges(0).size() == 1);
}
