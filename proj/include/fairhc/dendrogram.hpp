#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairhc {

using NodeId = std::uint32_t;
using PointId = std::uint32_t;
// Zero-based color index. Datasets and the CLI speak 1-based color ids;
// conversion happens at the ingest boundary.
using Color = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind : std::uint8_t { Leaf, Internal, Dummy };

// Description of one node, used to build a tree with caller-chosen ids.
struct NodeSpec {
    NodeId id = kNoNode;
    std::vector<NodeId> children;
    std::optional<PointId> point;
};

// Rooted tree whose leaves biject with the points of a dataset.
//
// Nodes live in an arena and keep their id for the whole lifetime of the
// tree; erased nodes become tombstones and their ids are never reused. Every
// node caches its leaf count and per-color leaf counts; the mutation methods
// below keep those caches exact by walking the affected ancestor path.
//
// Internal nodes normally have at least two children. Zero-leaf dummy nodes
// and transiently unary nodes exist only while an operator is running;
// validate() rejects them.
class Dendrogram {
public:
    Dendrogram() = default;

    // One leaf per point, leaf node id == point id, no internal nodes and no
    // root yet. Use add_internal()/set_root() to assemble a tree.
    Dendrogram(std::vector<Color> point_colors, std::size_t num_colors);

    // Builds a tree from explicit node descriptions. Ids may be sparse; the
    // missing ids become tombstones. Throws ShapeError on malformed input.
    static Dendrogram from_nodes(std::vector<Color> point_colors, std::size_t num_colors,
                                 std::span<const NodeSpec> nodes, NodeId root);

    // Binary tree from a merge list: merge i creates node num_points + i over
    // the two given node ids. The last merge becomes the root.
    static Dendrogram from_merges(std::vector<Color> point_colors, std::size_t num_colors,
                                  std::span<const std::pair<NodeId, NodeId>> merges);

    // Root with every point as a direct leaf child.
    static Dendrogram trivial(std::vector<Color> point_colors, std::size_t num_colors);

    std::size_t num_points() const { return point_colors_.size(); }
    std::size_t num_colors() const { return num_colors_; }
    std::span<const Color> point_colors() const { return point_colors_; }
    Color color_of(PointId p) const;

    NodeId root() const { return root_; }
    // Size of the id space, including tombstones.
    std::size_t capacity() const { return nodes_.size(); }
    bool contains(NodeId v) const { return v < nodes_.size() && nodes_[v].alive; }

    NodeKind kind(NodeId v) const { return node(v).kind; }
    bool is_leaf(NodeId v) const { return node(v).kind == NodeKind::Leaf; }
    bool is_dummy(NodeId v) const { return node(v).kind == NodeKind::Dummy; }
    std::optional<NodeId> parent(NodeId v) const;
    std::span<const NodeId> children(NodeId v) const { return node(v).children; }
    std::optional<PointId> point(NodeId v) const;
    NodeId leaf_of(PointId p) const;

    std::size_t leaf_count(NodeId v) const { return node(v).leaf_count; }
    std::span<const std::uint32_t> color_counts(NodeId v) const { return node(v).color_counts; }

    std::vector<NodeId> live_nodes() const;
    std::vector<NodeId> internal_nodes() const;
    // Points under v in depth-first, child-order sequence.
    std::vector<PointId> leaves_under(NodeId v) const;
    // Number of edges from the root to v.
    std::size_t depth(NodeId v) const;
    // True when a == d or a is a proper ancestor of d.
    bool is_ancestor_or_self(NodeId a, NodeId d) const;
    bool is_binary() const;

    // -- low-level mutation; operators are built from these ------------------

    // New internal node over detached fragment roots. If one of them is the
    // tree root, the new node becomes the root.
    NodeId add_internal(std::span<const NodeId> children);
    NodeId add_internal(std::initializer_list<NodeId> children) {
        return add_internal(std::span<const NodeId>(children.begin(), children.size()));
    }
    NodeId add_dummy();
    void set_root(NodeId v);
    // Unlinks v from its parent; ancestors lose v's counts.
    void detach(NodeId v);
    // Links detached `child` under `parent` at `position` (default: append).
    void attach(NodeId parent, NodeId child,
                std::size_t position = std::numeric_limits<std::size_t>::max());
    // Puts detached `replacement` into `old_child`'s slot; `old_child` ends
    // up detached.
    void replace_child(NodeId parent, NodeId old_child, NodeId replacement);
    // v must have exactly one child, which takes v's place. v is erased.
    void contract(NodeId v);
    // Tombstones a detached, childless non-leaf node.
    void erase(NodeId v);

    // Lists every violated structural invariant. Empty means valid.
    std::vector<std::string> check(bool allow_transient = false) const;
    // Throws InvariantError with the first problems found by check().
    void validate() const;

    friend bool operator==(const Dendrogram& a, const Dendrogram& b);

private:
    struct Node {
        NodeKind kind = NodeKind::Internal;
        bool alive = true;
        NodeId parent = kNoNode;
        std::vector<NodeId> children;
        PointId point = 0;
        std::size_t leaf_count = 0;
        std::vector<std::uint32_t> color_counts;
    };

    const Node& node(NodeId v) const;
    Node& node(NodeId v);
    NodeId new_node(NodeKind kind);
    void adjust_path(NodeId from, std::size_t count, std::span<const std::uint32_t> colors,
                     bool add);
    void recount_all();

    std::vector<Node> nodes_;
    std::vector<Color> point_colors_;
    std::vector<NodeId> leaf_of_point_;
    std::size_t num_colors_ = 0;
    NodeId root_ = kNoNode;
};

}  // namespace fairhc
