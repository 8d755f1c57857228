#pragma once

#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/similarity_graph.hpp"

namespace fairhc {

// One agglomeration step. Cluster ids follow creation order: points are
// 0..n-1 and merge i creates cluster n + i.
struct Merge {
    NodeId first = kNoNode;   // smaller id
    NodeId second = kNoNode;  // larger id
    double similarity = 0.0;  // average cross similarity at merge time
};

// Average-linkage merge sequence. Each step joins the pair with the largest
// sum-of-cross-weights / (|A| |B|); ties go to the lexicographically smallest
// (smaller id, larger id). Throws InputError when n < 2.
std::vector<Merge> average_linkage_merges(const SimilarityGraph& graph);

// Binary dendrogram of the merge sequence. Internal node ids equal cluster ids.
Dendrogram average_linkage(const SimilarityGraph& graph, std::vector<Color> point_colors,
                           std::size_t num_colors);

}  // namespace fairhc
