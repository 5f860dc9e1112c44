#pragma once

// Small hand-built contagion processes shared by the unit and acceptance
// suites. Node ids are deliberately not in activation order.

#include <utility>
#include <vector>

#include "cgf/cascade_graph.hpp"

namespace cgf::fixtures {

struct Fixture {
    FollowerGraph graph;
    ActivationLog log;
};

// Two-cascade toy process: seeds 1 and 2, node 4 shared, 3 and 7 isomorphic.
// Label -> node id: 1:501 2:207 3:333 4:120 5:918 6:444 7:105.
inline Fixture fig1() {
    Fixture f;
    const std::vector<std::pair<NodeId, NodeId>> fan_friend = {
        {333, 501}, {120, 501}, {120, 207}, {918, 207}, {444, 501}, {444, 333}, {105, 501},
        // edges that never carry information (friend activates later) and
        // fans that never vote
        {501, 333}, {207, 918}, {700, 105}, {701, 120}, {701, 444},
    };
    for (auto [a, b] : fan_friend) {
        f.graph.add_edge(a, b);
    }
    f.log.story_id = "fig1";
    f.log.records = {{120, 4.0}, {501, 1.0}, {918, 6.0}, {207, 2.0},
                     {444, 7.25}, {333, 3.5}, {105, 9.0}};
    return f;
}

inline ActivationLog sequential_log(const std::string& story, std::size_t n, NodeId first = 1) {
    ActivationLog log{story, {}};
    for (std::size_t i = 0; i < n; ++i) {
        log.records.push_back({first + i, static_cast<double>(i)});
    }
    return log;
}

// 1 -> 2 -> ... -> 6
inline Fixture chain6() {
    Fixture f;
    for (NodeId i = 2; i <= 6; ++i) {
        f.graph.add_edge(i, i - 1);
    }
    f.log = sequential_log("chain", 6);
    return f;
}

// 1 -> {2..6}
inline Fixture star6() {
    Fixture f;
    for (NodeId i = 2; i <= 6; ++i) {
        f.graph.add_edge(i, 1);
    }
    f.log = sequential_log("star", 6);
    return f;
}

// Every node watches every earlier node.
inline Fixture clique6() {
    Fixture f;
    for (NodeId i = 1; i <= 6; ++i) {
        for (NodeId j = 1; j < i; ++j) {
            f.graph.add_edge(i, j);
        }
    }
    f.log = sequential_log("clique", 6);
    return f;
}

} // namespace cgf::fixtures
