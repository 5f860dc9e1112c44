#include <doctest.h>

#include <random>

#include "cgf/metrics.hpp"
#include "cgf/oracle.hpp"
#include "fixtures.hpp"

using namespace cgf;

namespace {

CascadeGraph build(const fixtures::Fixture& f) { return build_cascade_graph(f.graph, f.log); }

oracle::DagSpec random_spec(std::uint64_t seed, std::size_t max_n) {
    std::mt19937_64 rng(seed * 7919);
    oracle::DagSpec s;
    s.nodes = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
    s.max_in_degree = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    s.seeds = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    s.random_seed = seed;
    return s;
}

} // namespace

TEST_CASE("fig1 metrics") {
    const auto cg = build(fixtures::fig1());
    for (Mode mode : {Mode::Numeric, Mode::Exact}) {
        const auto m = compute_metrics(cg, mode);
        REQUIRE(m.cascades.size() == 2);
        CHECK(m.cascades[0].spread == 4);
        CHECK(m.cascades[1].spread == 2);
        CHECK(m.cascades[0].size == 5);
        CHECK(m.cascades[1].size == 3);
        CHECK(m.diameter == 2);
        CHECK(m.cascades[0].diameter == 2);
        CHECK(m.cascades[1].diameter == 1);
        CHECK(m.cascades[0].paths.total_paths.value == 5);
        CHECK(m.cascades[0].paths.total_length.value == 6);
        CHECK(m.paths.total_paths.value == 7);
        CHECK(m.num_cascades == 2);
        CHECK(m.num_seeds == 2);
        CHECK(m.cascades[0].seed_node == 501);
        if (mode == Mode::Exact) {
            CHECK(*m.paths.total_length.exact == PathCount(8));
        } else {
            CHECK_FALSE(m.paths.total_length.exact.has_value());
        }
    }
    const auto members = cascade_membership(compute_tables(cg, Attenuation(0.5)));
    CHECK(members[0] == std::vector<Label>{0, 2, 3, 5, 6});
    CHECK(members[1] == std::vector<Label>{1, 3, 4});
}

TEST_CASE("prototype cascades") {
    SUBCASE("chain") {
        const auto m = compute_metrics(build(fixtures::chain6()), Mode::Exact);
        CHECK(*m.paths.total_paths.exact == PathCount(5));
        CHECK(*m.paths.total_length.exact == PathCount(15));
        CHECK(*m.paths.average_length() == 3.0);
        CHECK(m.diameter == 5);
        CHECK(m.spread == 1);
    }
    SUBCASE("clique") {
        const auto m = compute_metrics(build(fixtures::clique6()), Mode::Exact);
        CHECK(*m.paths.total_paths.exact == PathCount(31));
        CHECK(*m.paths.total_length.exact == PathCount(80));
        CHECK(*m.paths.average_length() == doctest::Approx(80.0 / 31.0).epsilon(1e-12));
        CHECK(m.diameter == 5);
    }
    SUBCASE("star") {
        const auto m = compute_metrics(build(fixtures::star6()), Mode::Numeric);
        CHECK(m.paths.total_paths.value == 5);
        CHECK(m.paths.total_length.value == 5);
        CHECK(*m.paths.average_length() == 1.0);
        CHECK(m.spread == 5);
        CHECK(m.size == 6);
        CHECK(m.diameter == 1);
    }
}

TEST_CASE("lone seed has no paths") {
    FollowerGraph g;
    g.add_node(9);
    ActivationLog log{"s", {{9, 0.0}}};
    const auto m = compute_metrics(build_cascade_graph(g, log));
    CHECK(m.num_cascades == 0);
    CHECK(m.num_seeds == 1);
    CHECK_FALSE(m.paths.average_length().has_value());
    CHECK(m.cascades[0].size == 1);
    CHECK(m.cascades[0].spread == 0);
    CHECK(m.diameter == 0);
}

TEST_CASE("metrics match brute force on random DAGs") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        const auto cg = oracle::random_dag(random_spec(seed, 25));
        const auto m = compute_metrics(cg, Mode::Exact);
        const auto num = compute_metrics(cg, Mode::Numeric);
        REQUIRE(m.diameter == oracle::longest_path(cg));
        REQUIRE(num.diameter == m.diameter);
        const auto members = cascade_membership(compute_path_profiles(cg));
        PathCount all_paths, all_len;
        for (std::size_t p = 0; p < cg.seeds().size(); ++p) {
            const Label s = cg.seeds()[p];
            const auto reach = oracle::reachable_from(cg, s);
            std::vector<Label> expect;
            std::uint64_t paths = 0, len = 0;
            std::uint32_t longest = 0;
            const auto hist = oracle::enumerate_paths(cg, s);
            for (std::size_t j = 0; j < cg.size(); ++j) {
                if (reach[j]) {
                    expect.push_back(static_cast<Label>(j));
                }
                if (j == s) {
                    continue;
                }
                for (auto [l, c] : hist[j]) {
                    paths += c;
                    len += l * c;
                    longest = std::max(longest, l);
                }
            }
            REQUIRE(members[p] == expect);
            const auto& c = m.cascades[p];
            REQUIRE(*c.paths.total_paths.exact == PathCount(paths));
            REQUIRE(*c.paths.total_length.exact == PathCount(len));
            REQUIRE(num.cascades[p].paths.total_paths.value == static_cast<double>(paths));
            REQUIRE(c.diameter == longest);
            REQUIRE(c.size == expect.size());
            // spread: most in-cascade fans of one member
            std::size_t best = 0;
            for (Label u : expect) {
                std::size_t k = 0;
                for (Label v : cg.out_edges(u)) {
                    k += std::binary_search(expect.begin(), expect.end(), v) ? 1 : 0;
                }
                best = std::max(best, k);
            }
            REQUIRE(c.spread == best);
            if (paths > 0) {
                const double avg = *c.paths.average_length();
                CHECK(avg >= 1.0);
                CHECK(avg <= c.diameter);
            }
            all_paths += PathCount(paths);
            all_len += PathCount(len);
        }
        REQUIRE(*m.paths.total_paths.exact == all_paths);
        REQUIRE(*m.paths.total_length.exact == all_len);
        CHECK(m.diameter <= cg.size() - 1);
    }
}

TEST_CASE("longest-path depth equals the top exponent of the profile") {
    for (std::uint64_t seed = 900; seed < 950; ++seed) {
        const auto cg = oracle::random_dag(random_spec(seed, 40));
        const auto d = diameter(cg);
        const auto prof = compute_path_profiles(cg);
        for (std::size_t j = 0; j < cg.size(); ++j) {
            std::size_t top = 0;
            for (const auto& e : prof.row(static_cast<Label>(j))) {
                top = std::max(top, e.poly.max_degree());
            }
            CHECK(d.depth[j] == top);
        }
    }
}

TEST_CASE("chain of n nodes") {
    for (std::size_t n : {1u, 2u, 10u, 300u}) {
        FollowerGraph g;
        for (NodeId i = 2; i <= n; ++i) {
            g.add_edge(i, i - 1);
        }
        g.add_node(1);
        const auto m = compute_metrics(build_cascade_graph(g, fixtures::sequential_log("c", n)));
        CHECK(m.diameter == n - 1);
        CHECK(m.spread == (n > 1 ? 1u : 0u));
    }
}
