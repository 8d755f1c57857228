#pragma once

#include "fairhc/dendrogram.hpp"
#include "fairhc/similarity_graph.hpp"

namespace fairhc {

// Deepest node having both leaves below it. Throws InvalidPairError when
// u == v and InvalidNodeError when either id is not a live leaf.
NodeId lca(const Dendrogram& tree, NodeId u, NodeId v);

// w(i,j) times the size of the smallest cluster holding both points.
double edge_cost(const Dendrogram& tree, const SimilarityGraph& graph, PointId i, PointId j);

// Dasgupta cost aggregated per internal node: every pair whose lowest common
// ancestor is v contributes leaf_count(v) times its weight, and the pairs of v
// are exactly the cross-child pairs. O(n^2 + n * depth).
double total_cost(const Dendrogram& tree, const SimilarityGraph& graph);

// Same quantity summed pair by pair through lca(). Slow; kept as the
// independent route that total_cost() is checked against.
double total_cost_pairwise(const Dendrogram& tree, const SimilarityGraph& graph);

}  // namespace fairhc
