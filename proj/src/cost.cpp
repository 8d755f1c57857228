#include "fairhc/cost.hpp"

#include <cmath>
#include <string>

#include "fairhc/error.hpp"

namespace fairhc {

void SimilarityGraph::set_weight(std::size_t i, std::size_t j, double w) {
    if (i >= n_ || j >= n_) {
        throw InputError("similarity index out of range");
    }
    if (i == j) {
        throw InputError("similarity graph has no self loops");
    }
    if (!std::isfinite(w) || w < 0.0) {
        throw InputError("similarity weights must be finite and nonnegative");
    }
    w_[i * n_ + j] = w;
    w_[j * n_ + i] = w;
}

namespace {

void require_leaf(const Dendrogram& tree, NodeId v) {
    if (!tree.contains(v) || !tree.is_leaf(v)) {
        throw InvalidNodeError("node " + std::to_string(v) + " is not a leaf");
    }
}

void require_matching(const Dendrogram& tree, const SimilarityGraph& graph) {
    if (tree.num_points() != graph.size()) {
        throw ShapeError("tree has " + std::to_string(tree.num_points()) +
                         " leaves but graph has " + std::to_string(graph.size()) + " vertices");
    }
}

}  // namespace

NodeId lca(const Dendrogram& tree, NodeId u, NodeId v) {
    require_leaf(tree, u);
    require_leaf(tree, v);
    if (u == v) {
        throw InvalidPairError("lca of a leaf with itself");
    }
    std::size_t du = tree.depth(u);
    std::size_t dv = tree.depth(v);
    while (du > dv) {
        u = *tree.parent(u);
        --du;
    }
    while (dv > du) {
        v = *tree.parent(v);
        --dv;
    }
    while (u != v) {
        u = *tree.parent(u);
        v = *tree.parent(v);
    }
    return u;
}

double edge_cost(const Dendrogram& tree, const SimilarityGraph& graph, PointId i, PointId j) {
    require_matching(tree, graph);
    if (i == j) {
        throw InvalidPairError("edge cost of a point with itself");
    }
    NodeId a = lca(tree, tree.leaf_of(i), tree.leaf_of(j));
    return graph.weight(i, j) * static_cast<double>(tree.leaf_count(a));
}

double total_cost(const Dendrogram& tree, const SimilarityGraph& graph) {
    require_matching(tree, graph);
    const std::size_t n = tree.num_points();
    if (n < 2) {
        return 0.0;
    }
    // Leaves of every node occupy a contiguous block of the DFS order.
    std::vector<PointId> order;
    order.reserve(n);
    std::vector<std::size_t> begin(tree.capacity(), 0);
    std::vector<std::size_t> end(tree.capacity(), 0);
    std::vector<std::pair<NodeId, bool>> stack{{tree.root(), false}};
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            end[v] = order.size();
            continue;
        }
        begin[v] = order.size();
        if (auto p = tree.point(v)) {
            order.push_back(*p);
            end[v] = order.size();
            continue;
        }
        stack.emplace_back(v, true);
        auto kids = tree.children(v);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.emplace_back(*it, false);
        }
    }
    if (order.size() != n) {
        throw ShapeError("tree leaves do not cover the graph");
    }

    double cost = 0.0;
    for (NodeId v : tree.internal_nodes()) {
        auto kids = tree.children(v);
        if (kids.size() < 2) {
            continue;
        }
        double cross = 0.0;
        // Every pair of v's leaves in different children: i ranges over the
        // earlier child, j over all later children (one contiguous block).
        for (std::size_t a = 0; a + 1 < kids.size(); ++a) {
            const std::size_t later_begin = begin[kids[a + 1]];
            const std::size_t later_end = end[v];
            for (std::size_t i = begin[kids[a]]; i < end[kids[a]]; ++i) {
                const double* row = graph.row(order[i]);
                for (std::size_t j = later_begin; j < later_end; ++j) {
                    cross += row[order[j]];
                }
            }
        }
        cost += cross * static_cast<double>(tree.leaf_count(v));
    }
    return cost;
}

double total_cost_pairwise(const Dendrogram& tree, const SimilarityGraph& graph) {
    require_matching(tree, graph);
    double cost = 0.0;
    for (PointId i = 0; i < tree.num_points(); ++i) {
        for (PointId j = i + 1; j < tree.num_points(); ++j) {
            cost += edge_cost(tree, graph, i, j);
        }
    }
    return cost;
}

}  // namespace fairhc
