#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>

namespace cgf {

using NodeId = std::uint64_t;
// Temporal label, 0-based internally. Reports print label + 1 so that the
// first activated node is "1".
using Label = std::uint32_t;
using Timestamp = double;

// How a directed pair (a, b) in an input edge list is read.
enum class EdgeConvention {
    FanToFriend,  // a watches b, information flows b -> a
    FriendToFan,  // a is watched by b, information flows a -> b
};

// Static snapshot of the follower network. friends_of(x) lists the nodes x
// watches; an activated friend can activate x.
class FollowerGraph {
public:
    void add_node(NodeId id);

    // Inserts the edge and both endpoints. Returns false if the edge was
    // already present. Self-loops are rejected with InputError.
    bool add_edge(NodeId a, NodeId b, EdgeConvention convention = EdgeConvention::FanToFriend);

    bool contains(NodeId id) const { return friends_.count(id) != 0; }
    std::span<const NodeId> friends_of(NodeId fan) const;

    // All (fan, friend) pairs, sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    std::size_t node_count() const { return friends_.size(); }
    std::size_t edge_count() const { return edges_; }

private:
    absl::flat_hash_map<NodeId, std::vector<NodeId>> friends_;  // each list sorted
    std::size_t edges_ = 0;
};

struct Activation {
    NodeId node = 0;
    Timestamp time = 0.0;
};

struct ActivationLog {
    std::string story_id;
    std::vector<Activation> records;
};

// The temporally labelled cascade DAG. Edges run from smaller to larger
// labels; immutable once built.
class CascadeGraph {
public:
    CascadeGraph() = default;

    // Builds from explicit per-label in-edge lists. Validates the DAG and
    // tie invariants; throws InputError on violation.
    static CascadeGraph from_in_edges(std::vector<NodeId> node_ids,
                                      std::vector<Timestamp> timestamps,
                                      std::vector<std::vector<Label>> in_edges);

    std::size_t size() const { return node_ids_.size(); }
    bool empty() const { return node_ids_.empty(); }

    NodeId node_id(Label l) const { return node_ids_[l]; }
    Timestamp timestamp(Label l) const { return timestamps_[l]; }
    std::span<const NodeId> node_ids() const { return node_ids_; }
    std::span<const Timestamp> timestamps() const { return timestamps_; }

    std::span<const Label> in_edges(Label l) const {
        return {in_targets_.data() + in_offsets_[l], in_targets_.data() + in_offsets_[l + 1]};
    }
    std::span<const Label> out_edges(Label l) const {
        return {out_targets_.data() + out_offsets_[l], out_targets_.data() + out_offsets_[l + 1]};
    }
    std::size_t in_degree(Label l) const { return in_offsets_[l + 1] - in_offsets_[l]; }
    std::size_t out_degree(Label l) const { return out_offsets_[l + 1] - out_offsets_[l]; }
    std::size_t edge_count() const { return in_targets_.size(); }
    std::size_t max_in_degree() const;

    // Seeds in label order. seed_index(l) is the position of l in that list.
    std::span<const Label> seeds() const { return seeds_; }
    std::optional<std::size_t> seed_index(Label l) const;

    std::optional<Label> label_of(NodeId id) const;

    friend bool operator==(const CascadeGraph& a, const CascadeGraph& b) {
        return a.node_ids_ == b.node_ids_ && a.timestamps_ == b.timestamps_ &&
               a.in_offsets_ == b.in_offsets_ && a.in_targets_ == b.in_targets_;
    }

private:
    friend class CascadeGraphBuilder;
    void finalize();

    std::vector<NodeId> node_ids_;
    std::vector<Timestamp> timestamps_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<Label> in_targets_;
    std::vector<std::size_t> out_offsets_;
    std::vector<Label> out_targets_;
    std::vector<Label> seeds_;
    std::vector<std::int64_t> seed_index_;
};

struct BuildOptions {
    // Reject activations by nodes missing from the follower graph instead of
    // admitting them as isolated seeds.
    bool strict = false;
};

// Incremental construction in activation order. Used by the batch builder
// and by the streaming engine.
class CascadeGraphBuilder {
public:
    explicit CascadeGraphBuilder(const FollowerGraph& g, BuildOptions options = {});

    // Appends the next activation and returns its label. Timestamps must be
    // non-decreasing; equal-timestamp activations never link to each other.
    Label append(NodeId node, Timestamp time);

    std::span<const Label> in_edges(Label l) const { return graph_.in_edges(l); }
    std::size_t size() const { return graph_.node_ids_.size(); }
    void reserve(std::size_t activations);

    // Snapshot of everything appended so far.
    CascadeGraph build() const;

private:
    const FollowerGraph* follower_;
    BuildOptions options_;
    CascadeGraph graph_;
    absl::flat_hash_map<NodeId, Label> labels_;
    std::vector<Label> scratch_;
};

// Sorts the log by (timestamp, node-id) and builds the cascade graph.
CascadeGraph build_cascade_graph(const FollowerGraph& g, const ActivationLog& log,
                                 BuildOptions options = {});

struct SeedClasses {
    std::vector<Label> active;   // seeds with at least one outgoing active edge
    std::vector<Label> trivial;  // the rest
};

SeedClasses classify_seeds(const CascadeGraph& cg);

} // namespace cgf
