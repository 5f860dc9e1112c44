#include "cgf/cascade_graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cgf/errors.hpp"

namespace cgf {

void FollowerGraph::add_node(NodeId id) { friends_.try_emplace(id); }

bool FollowerGraph::add_edge(NodeId a, NodeId b, EdgeConvention convention) {
    if (a == b) {
        throw InputError("self-loop on node " + std::to_string(a));
    }
    const NodeId fan = convention == EdgeConvention::FanToFriend ? a : b;
    const NodeId friend_id = convention == EdgeConvention::FanToFriend ? b : a;
    add_node(friend_id);
    auto& list = friends_[fan];
    auto it = std::lower_bound(list.begin(), list.end(), friend_id);
    if (it != list.end() && *it == friend_id) {
        return false;
    }
    list.insert(it, friend_id);
    ++edges_;
    return true;
}

std::vector<std::pair<NodeId, NodeId>> FollowerGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edges_);
    for (const auto& [fan, friends] : friends_) {
        for (NodeId f : friends) {
            out.emplace_back(fan, f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::span<const NodeId> FollowerGraph::friends_of(NodeId fan) const {
    auto it = friends_.find(fan);
    if (it == friends_.end()) {
        return {};
    }
    return it->second;
}

std::size_t CascadeGraph::max_in_degree() const {
    std::size_t d = 0;
    for (std::size_t l = 0; l < size(); ++l) {
        d = std::max(d, in_degree(static_cast<Label>(l)));
    }
    return d;
}

std::optional<std::size_t> CascadeGraph::seed_index(Label l) const {
    if (l >= seed_index_.size() || seed_index_[l] < 0) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(seed_index_[l]);
}

std::optional<Label> CascadeGraph::label_of(NodeId id) const {
    for (std::size_t l = 0; l < node_ids_.size(); ++l) {
        if (node_ids_[l] == id) {
            return static_cast<Label>(l);
        }
    }
    return std::nullopt;
}

void CascadeGraph::finalize() {
    const std::size_t n = node_ids_.size();
    seeds_.clear();
    seed_index_.assign(n, -1);
    std::vector<std::size_t> out_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto in = in_edges(static_cast<Label>(i));
        if (in.empty()) {
            seed_index_[i] = static_cast<std::int64_t>(seeds_.size());
            seeds_.push_back(static_cast<Label>(i));
        }
        for (Label j : in) {
            ++out_count[j];
        }
    }
    out_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out_offsets_[i + 1] = out_offsets_[i] + out_count[i];
    }
    out_targets_.assign(in_targets_.size(), 0);
    std::vector<std::size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    // Targets come out sorted because heads are visited in label order.
    for (std::size_t i = 0; i < n; ++i) {
        for (Label j : in_edges(static_cast<Label>(i))) {
            out_targets_[cursor[j]++] = static_cast<Label>(i);
        }
    }
}

CascadeGraph CascadeGraph::from_in_edges(std::vector<NodeId> node_ids,
                                         std::vector<Timestamp> timestamps,
                                         std::vector<std::vector<Label>> in_edges) {
    const std::size_t n = node_ids.size();
    if (timestamps.size() != n || in_edges.size() != n) {
        throw InputError("cascade graph: ids, timestamps and in-edge lists differ in length");
    }
    CascadeGraph g;
    g.node_ids_ = std::move(node_ids);
    g.timestamps_ = std::move(timestamps);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && g.timestamps_[i] < g.timestamps_[i - 1]) {
            throw InputError("cascade graph: timestamps not in label order at label " +
                             std::to_string(i + 1));
        }
        auto& in = in_edges[i];
        std::sort(in.begin(), in.end());
        if (std::adjacent_find(in.begin(), in.end()) != in.end()) {
            throw InputError("cascade graph: duplicate in-edge at label " + std::to_string(i + 1));
        }
        for (Label j : in) {
            if (j >= i) {
                throw InputError("cascade graph: edge " + std::to_string(j + 1) + "->" +
                                 std::to_string(i + 1) + " does not point forward in time");
            }
            if (!(g.timestamps_[j] < g.timestamps_[i])) {
                throw InputError("cascade graph: edge " + std::to_string(j + 1) + "->" +
                                 std::to_string(i + 1) + " joins equal timestamps");
            }
        }
        g.in_targets_.insert(g.in_targets_.end(), in.begin(), in.end());
        g.in_offsets_.push_back(g.in_targets_.size());
    }
    g.finalize();
    return g;
}

CascadeGraphBuilder::CascadeGraphBuilder(const FollowerGraph& g, BuildOptions options)
    : follower_(&g), options_(options) {}

void CascadeGraphBuilder::reserve(std::size_t activations) {
    labels_.reserve(activations);
    graph_.node_ids_.reserve(activations);
    graph_.timestamps_.reserve(activations);
    graph_.in_offsets_.reserve(activations + 1);
}

Label CascadeGraphBuilder::append(NodeId node, Timestamp time) {
    auto& cg = graph_;
    if (!(time >= 0.0)) {
        throw InputError("activation of node " + std::to_string(node) +
                         " has a negative or non-numeric timestamp");
    }
    if (!cg.timestamps_.empty() && time < cg.timestamps_.back()) {
        throw InputError("activation (node " + std::to_string(node) + ", t=" +
                         std::to_string(time) + ") arrives before t=" +
                         std::to_string(cg.timestamps_.back()));
    }
    if (labels_.contains(node)) {
        throw InputError("node " + std::to_string(node) + " activated twice");
    }
    if (options_.strict && !follower_->contains(node)) {
        throw InputError("activation by node " + std::to_string(node) +
                         " which is not in the follower graph");
    }
    const auto label = static_cast<Label>(cg.node_ids_.size());
    scratch_.clear();
    for (NodeId f : follower_->friends_of(node)) {
        auto it = labels_.find(f);
        if (it != labels_.end() && cg.timestamps_[it->second] < time) {
            scratch_.push_back(it->second);
        }
    }
    std::sort(scratch_.begin(), scratch_.end());
    labels_.emplace(node, label);
    cg.node_ids_.push_back(node);
    cg.timestamps_.push_back(time);
    cg.in_targets_.insert(cg.in_targets_.end(), scratch_.begin(), scratch_.end());
    cg.in_offsets_.push_back(cg.in_targets_.size());
    return label;
}

CascadeGraph CascadeGraphBuilder::build() const {
    CascadeGraph g;
    g.node_ids_ = graph_.node_ids_;
    g.timestamps_ = graph_.timestamps_;
    g.in_offsets_ = graph_.in_offsets_;
    g.in_targets_ = graph_.in_targets_;
    g.finalize();
    return g;
}

CascadeGraph build_cascade_graph(const FollowerGraph& g, const ActivationLog& log,
                                 BuildOptions options) {
    std::vector<Activation> records = log.records;
    std::sort(records.begin(), records.end(), [](const Activation& a, const Activation& b) {
        return a.time < b.time || (a.time == b.time && a.node < b.node);
    });
    CascadeGraphBuilder builder(g, options);
    builder.reserve(records.size());
    for (const auto& r : records) {
        builder.append(r.node, r.time);
    }
    return builder.build();
}

SeedClasses classify_seeds(const CascadeGraph& cg) {
    SeedClasses out;
    for (Label s : cg.seeds()) {
        (cg.out_degree(s) > 0 ? out.active : out.trivial).push_back(s);
    }
    return out;
}

} // namespace cgf
