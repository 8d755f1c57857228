#include "fairhc/dendrogram.hpp"

#include <algorithm>
#include <sstream>

#include "fairhc/error.hpp"

namespace fairhc {

namespace {

std::string node_str(NodeId v) { return "node " + std::to_string(v); }

}  // namespace

Dendrogram::Dendrogram(std::vector<Color> point_colors, std::size_t num_colors)
    : point_colors_(std::move(point_colors)), num_colors_(num_colors) {
    if (num_colors_ == 0) {
        throw InputError("dendrogram needs at least one color");
    }
    nodes_.reserve(2 * point_colors_.size());
    leaf_of_point_.resize(point_colors_.size());
    for (PointId p = 0; p < point_colors_.size(); ++p) {
        if (point_colors_[p] >= num_colors_) {
            throw InputError("point " + std::to_string(p) + " has color out of range");
        }
        NodeId v = new_node(NodeKind::Leaf);
        Node& n = nodes_[v];
        n.point = p;
        n.leaf_count = 1;
        n.color_counts[point_colors_[p]] = 1;
        leaf_of_point_[p] = v;
    }
}

Dendrogram Dendrogram::from_nodes(std::vector<Color> point_colors, std::size_t num_colors,
                                  std::span<const NodeSpec> specs, NodeId root) {
    Dendrogram t;
    t.point_colors_ = std::move(point_colors);
    t.num_colors_ = num_colors;
    if (num_colors == 0) {
        throw InputError("dendrogram needs at least one color");
    }
    NodeId max_id = 0;
    for (const auto& s : specs) {
        if (s.id == kNoNode) {
            throw ShapeError("node id out of range");
        }
        max_id = std::max(max_id, s.id);
    }
    if (specs.empty()) {
        throw ShapeError("tree has no nodes");
    }
    t.nodes_.resize(std::size_t{max_id} + 1);
    for (auto& n : t.nodes_) {
        n.alive = false;
    }
    std::vector<bool> seen(t.nodes_.size(), false);
    t.leaf_of_point_.assign(t.point_colors_.size(), kNoNode);
    for (const auto& s : specs) {
        if (seen[s.id]) {
            throw ShapeError("duplicate " + node_str(s.id));
        }
        seen[s.id] = true;
        Node& n = t.nodes_[s.id];
        n.alive = true;
        n.color_counts.assign(num_colors, 0);
        if (s.point) {
            if (!s.children.empty()) {
                throw ShapeError(node_str(s.id) + " is a leaf with children");
            }
            if (*s.point >= t.point_colors_.size()) {
                throw ShapeError(node_str(s.id) + " references unknown point " +
                                 std::to_string(*s.point));
            }
            if (t.leaf_of_point_[*s.point] != kNoNode) {
                throw ShapeError("point " + std::to_string(*s.point) + " appears twice");
            }
            if (t.point_colors_[*s.point] >= num_colors) {
                throw InputError("point " + std::to_string(*s.point) + " has color out of range");
            }
            n.kind = NodeKind::Leaf;
            n.point = *s.point;
            t.leaf_of_point_[*s.point] = s.id;
        } else {
            n.kind = NodeKind::Internal;
            if (s.children.empty()) {
                throw ShapeError(node_str(s.id) + " has neither children nor a point");
            }
            n.children = s.children;
        }
    }
    for (const auto& s : specs) {
        for (NodeId c : s.children) {
            if (c >= t.nodes_.size() || !seen[c]) {
                throw ShapeError(node_str(s.id) + " references missing child " +
                                 std::to_string(c));
            }
            if (t.nodes_[c].parent != kNoNode) {
                throw ShapeError(node_str(c) + " has two parents");
            }
            t.nodes_[c].parent = s.id;
        }
    }
    for (PointId p = 0; p < t.leaf_of_point_.size(); ++p) {
        if (t.leaf_of_point_[p] == kNoNode) {
            throw ShapeError("point " + std::to_string(p) + " has no leaf");
        }
    }
    if (root >= t.nodes_.size() || !seen[root]) {
        throw ShapeError("root " + std::to_string(root) + " is not a node");
    }
    if (t.nodes_[root].parent != kNoNode) {
        throw ShapeError("root has a parent");
    }
    t.root_ = root;
    // Reachability also rules out cycles, since every node has one parent.
    std::size_t reached = 0;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        ++reached;
        for (NodeId c : t.nodes_[v].children) {
            stack.push_back(c);
        }
        if (reached > specs.size()) {
            throw ShapeError("tree contains a cycle");
        }
    }
    if (reached != specs.size()) {
        throw ShapeError(std::to_string(specs.size() - reached) +
                         " node(s) unreachable from root");
    }
    t.recount_all();
    return t;
}

Dendrogram Dendrogram::from_merges(std::vector<Color> point_colors, std::size_t num_colors,
                                   std::span<const std::pair<NodeId, NodeId>> merges) {
    Dendrogram t(std::move(point_colors), num_colors);
    if (t.num_points() == 1 && merges.empty()) {
        t.set_root(0);
        return t;
    }
    if (merges.size() + 1 != t.num_points()) {
        throw ShapeError("merge list must have n - 1 entries");
    }
    NodeId last = kNoNode;
    for (const auto& [a, b] : merges) {
        last = t.add_internal({a, b});
    }
    t.set_root(last);
    return t;
}

Dendrogram Dendrogram::trivial(std::vector<Color> point_colors, std::size_t num_colors) {
    Dendrogram t(std::move(point_colors), num_colors);
    if (t.num_points() == 1) {
        t.set_root(0);
        return t;
    }
    std::vector<NodeId> leaves(t.num_points());
    for (PointId p = 0; p < leaves.size(); ++p) {
        leaves[p] = p;
    }
    t.set_root(t.add_internal(leaves));
    return t;
}

Color Dendrogram::color_of(PointId p) const {
    if (p >= point_colors_.size()) {
        throw InvalidNodeError("unknown point " + std::to_string(p));
    }
    return point_colors_[p];
}

const Dendrogram::Node& Dendrogram::node(NodeId v) const {
    if (!contains(v)) {
        throw InvalidNodeError("unknown " + node_str(v));
    }
    return nodes_[v];
}

Dendrogram::Node& Dendrogram::node(NodeId v) {
    if (!contains(v)) {
        throw InvalidNodeError("unknown " + node_str(v));
    }
    return nodes_[v];
}

std::optional<NodeId> Dendrogram::parent(NodeId v) const {
    NodeId p = node(v).parent;
    if (p == kNoNode) {
        return std::nullopt;
    }
    return p;
}

std::optional<PointId> Dendrogram::point(NodeId v) const {
    const Node& n = node(v);
    if (n.kind != NodeKind::Leaf) {
        return std::nullopt;
    }
    return n.point;
}

NodeId Dendrogram::leaf_of(PointId p) const {
    if (p >= leaf_of_point_.size()) {
        throw InvalidNodeError("unknown point " + std::to_string(p));
    }
    return leaf_of_point_[p];
}

std::vector<NodeId> Dendrogram::live_nodes() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].alive) {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<NodeId> Dendrogram::internal_nodes() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].alive && nodes_[v].kind == NodeKind::Internal) {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<PointId> Dendrogram::leaves_under(NodeId v) const {
    std::vector<PointId> out;
    out.reserve(node(v).leaf_count);
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        const Node& n = nodes_[u];
        if (n.kind == NodeKind::Leaf) {
            out.push_back(n.point);
        }
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
            stack.push_back(*it);
        }
    }
    return out;
}

std::size_t Dendrogram::depth(NodeId v) const {
    std::size_t d = 0;
    for (NodeId p = node(v).parent; p != kNoNode; p = nodes_[p].parent) {
        ++d;
    }
    return d;
}

bool Dendrogram::is_ancestor_or_self(NodeId a, NodeId d) const {
    node(a);
    for (NodeId v = d; v != kNoNode; v = node(v).parent) {
        if (v == a) {
            return true;
        }
    }
    return false;
}

bool Dendrogram::is_binary() const {
    for (const Node& n : nodes_) {
        if (n.alive && n.kind == NodeKind::Internal && n.children.size() != 2) {
            return false;
        }
    }
    return true;
}

NodeId Dendrogram::new_node(NodeKind kind) {
    if (nodes_.size() >= kNoNode) {
        throw Error("node arena exhausted");
    }
    Node n;
    n.kind = kind;
    n.color_counts.assign(num_colors_, 0);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Dendrogram::add_internal(std::span<const NodeId> children) {
    bool adopts_root = false;
    for (NodeId c : children) {
        if (node(c).parent != kNoNode) {
            throw PreconditionError(node_str(c) + " already has a parent");
        }
        adopts_root = adopts_root || c == root_;
    }
    std::vector<NodeId> sorted(children.begin(), children.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw PreconditionError("duplicate child in add_internal");
    }
    NodeId v = new_node(NodeKind::Internal);
    Node& n = nodes_[v];
    n.children.assign(children.begin(), children.end());
    for (NodeId c : children) {
        Node& cn = nodes_[c];
        cn.parent = v;
        n.leaf_count += cn.leaf_count;
        for (std::size_t l = 0; l < num_colors_; ++l) {
            n.color_counts[l] += cn.color_counts[l];
        }
    }
    if (adopts_root) {
        root_ = v;
    }
    return v;
}

NodeId Dendrogram::add_dummy() { return new_node(NodeKind::Dummy); }

void Dendrogram::set_root(NodeId v) {
    if (node(v).parent != kNoNode) {
        throw PreconditionError("root candidate " + node_str(v) + " has a parent");
    }
    root_ = v;
}

void Dendrogram::adjust_path(NodeId from, std::size_t count,
                             std::span<const std::uint32_t> colors, bool add) {
    for (NodeId v = from; v != kNoNode; v = nodes_[v].parent) {
        Node& n = nodes_[v];
        if (add) {
            n.leaf_count += count;
        } else {
            n.leaf_count -= count;
        }
        for (std::size_t l = 0; l < num_colors_; ++l) {
            if (add) {
                n.color_counts[l] += colors[l];
            } else {
                n.color_counts[l] -= colors[l];
            }
        }
    }
}

void Dendrogram::detach(NodeId v) {
    Node& n = node(v);
    if (n.parent == kNoNode) {
        throw PreconditionError(node_str(v) + " has no parent to detach from");
    }
    NodeId p = n.parent;
    auto& siblings = nodes_[p].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), v));
    n.parent = kNoNode;
    const std::vector<std::uint32_t> colors = n.color_counts;
    adjust_path(p, n.leaf_count, colors, false);
}

void Dendrogram::attach(NodeId parent, NodeId child, std::size_t position) {
    Node& p = node(parent);
    Node& c = node(child);
    if (p.kind == NodeKind::Leaf) {
        throw PreconditionError("cannot attach under leaf " + node_str(parent));
    }
    if (c.parent != kNoNode || child == root_) {
        throw PreconditionError(node_str(child) + " is not detached");
    }
    if (is_ancestor_or_self(child, parent)) {
        throw PreconditionError("attaching " + node_str(child) + " would create a cycle");
    }
    position = std::min(position, p.children.size());
    p.children.insert(p.children.begin() + static_cast<std::ptrdiff_t>(position), child);
    c.parent = parent;
    adjust_path(parent, c.leaf_count, c.color_counts, true);
}

void Dendrogram::replace_child(NodeId parent, NodeId old_child, NodeId replacement) {
    Node& p = node(parent);
    auto it = std::find(p.children.begin(), p.children.end(), old_child);
    if (it == p.children.end()) {
        throw PreconditionError(node_str(old_child) + " is not a child of " + node_str(parent));
    }
    Node& r = node(replacement);
    if (r.parent != kNoNode || replacement == root_) {
        throw PreconditionError(node_str(replacement) + " is not detached");
    }
    if (is_ancestor_or_self(replacement, parent)) {
        throw PreconditionError("replacing with " + node_str(replacement) +
                                " would create a cycle");
    }
    Node& o = nodes_[old_child];
    *it = replacement;
    o.parent = kNoNode;
    r.parent = parent;
    adjust_path(parent, o.leaf_count, o.color_counts, false);
    adjust_path(parent, r.leaf_count, r.color_counts, true);
}

void Dendrogram::contract(NodeId v) {
    Node& n = node(v);
    if (n.children.size() != 1) {
        throw PreconditionError("contract needs a unary node, " + node_str(v) + " has " +
                                std::to_string(n.children.size()) + " children");
    }
    NodeId c = n.children.front();
    NodeId g = n.parent;
    n.children.clear();
    nodes_[c].parent = g;
    if (g != kNoNode) {
        auto& gc = nodes_[g].children;
        *std::find(gc.begin(), gc.end(), v) = c;
    }
    if (root_ == v) {
        root_ = c;
    }
    n.alive = false;
}

void Dendrogram::erase(NodeId v) {
    Node& n = node(v);
    if (n.kind == NodeKind::Leaf) {
        throw PreconditionError("leaves cannot be erased");
    }
    if (n.parent != kNoNode || !n.children.empty() || v == root_) {
        throw PreconditionError(node_str(v) + " must be detached and childless to erase");
    }
    n.alive = false;
}

void Dendrogram::recount_all() {
    // Post-order over the rooted tree; detached fragments are left alone.
    std::vector<std::pair<NodeId, bool>> stack{{root_, false}};
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        Node& n = nodes_[v];
        if (!expanded) {
            stack.emplace_back(v, true);
            for (NodeId c : n.children) {
                stack.emplace_back(c, false);
            }
            continue;
        }
        std::fill(n.color_counts.begin(), n.color_counts.end(), 0U);
        if (n.kind == NodeKind::Leaf) {
            n.leaf_count = 1;
            n.color_counts[point_colors_[n.point]] = 1;
            continue;
        }
        n.leaf_count = 0;
        for (NodeId c : n.children) {
            n.leaf_count += nodes_[c].leaf_count;
            for (std::size_t l = 0; l < num_colors_; ++l) {
                n.color_counts[l] += nodes_[c].color_counts[l];
            }
        }
    }
}

std::vector<std::string> Dendrogram::check(bool allow_transient) const {
    std::vector<std::string> problems;
    if (!contains(root_)) {
        problems.push_back("no root");
        return problems;
    }
    if (nodes_[root_].parent != kNoNode) {
        problems.push_back("root has a parent");
    }
    std::vector<bool> reached(nodes_.size(), false);
    std::vector<std::size_t> fresh_count(nodes_.size(), 0);
    std::vector<std::vector<std::uint32_t>> fresh_colors(nodes_.size());
    std::vector<std::pair<NodeId, bool>> stack{{root_, false}};
    std::size_t visits = 0;
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[v];
        if (!expanded) {
            if (reached[v]) {
                problems.push_back(node_str(v) + " reached twice");
                continue;
            }
            reached[v] = true;
            if (++visits > nodes_.size()) {
                problems.push_back("cycle detected");
                break;
            }
            stack.emplace_back(v, true);
            for (NodeId c : n.children) {
                if (!contains(c)) {
                    problems.push_back(node_str(v) + " has dead child " + std::to_string(c));
                    continue;
                }
                if (nodes_[c].parent != v) {
                    problems.push_back(node_str(c) + " parent link disagrees with " +
                                       node_str(v));
                }
                stack.emplace_back(c, false);
            }
            continue;
        }
        fresh_colors[v].assign(num_colors_, 0);
        if (n.kind == NodeKind::Leaf) {
            fresh_count[v] = 1;
            if (n.point < point_colors_.size()) {
                fresh_colors[v][point_colors_[n.point]] = 1;
            }
            if (!n.children.empty()) {
                problems.push_back("leaf " + node_str(v) + " has children");
            }
        } else {
            for (NodeId c : n.children) {
                if (!contains(c)) {
                    continue;
                }
                fresh_count[v] += fresh_count[c];
                for (std::size_t l = 0; l < num_colors_ && l < fresh_colors[c].size(); ++l) {
                    fresh_colors[v][l] += fresh_colors[c][l];
                }
            }
            if (n.kind == NodeKind::Dummy && !allow_transient) {
                problems.push_back("dummy " + node_str(v) + " outside split");
            }
            if (n.kind == NodeKind::Internal && n.children.size() < 2 && !allow_transient) {
                problems.push_back(node_str(v) + " has " + std::to_string(n.children.size()) +
                                   " child(ren)");
            }
        }
        if (fresh_count[v] != n.leaf_count) {
            problems.push_back(node_str(v) + " cached leaf_count " +
                               std::to_string(n.leaf_count) + " != " +
                               std::to_string(fresh_count[v]));
        }
        if (fresh_colors[v] != n.color_counts) {
            problems.push_back(node_str(v) + " cached color counts are stale");
        }
    }
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].alive && !reached[v]) {
            problems.push_back(node_str(v) + " unreachable from root");
        }
    }
    for (PointId p = 0; p < leaf_of_point_.size(); ++p) {
        NodeId v = leaf_of_point_[p];
        if (!contains(v) || nodes_[v].kind != NodeKind::Leaf || nodes_[v].point != p) {
            problems.push_back("point " + std::to_string(p) + " has no leaf");
        }
    }
    return problems;
}

void Dendrogram::validate() const {
    auto problems = check(false);
    if (problems.empty()) {
        return;
    }
    std::ostringstream msg;
    msg << "dendrogram invariant violated: " << problems.front();
    if (problems.size() > 1) {
        msg << " (+" << problems.size() - 1 << " more)";
    }
    throw InvariantError(msg.str());
}

bool operator==(const Dendrogram& a, const Dendrogram& b) {
    if (a.root_ != b.root_ || a.point_colors_ != b.point_colors_ ||
        a.num_colors_ != b.num_colors_) {
        return false;
    }
    std::size_t cap = std::max(a.nodes_.size(), b.nodes_.size());
    for (NodeId v = 0; v < cap; ++v) {
        bool la = a.contains(v);
        bool lb = b.contains(v);
        if (la != lb) {
            return false;
        }
        if (!la) {
            continue;
        }
        const auto& x = a.nodes_[v];
        const auto& y = b.nodes_[v];
        if (x.kind != y.kind || x.children != y.children || x.parent != y.parent ||
            (x.kind == NodeKind::Leaf && x.point != y.point)) {
            return false;
        }
    }
    return true;
}

}  // namespace fairhc
