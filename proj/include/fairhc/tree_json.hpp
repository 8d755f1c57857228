#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairhc/dendrogram.hpp"

namespace fairhc {

// Tree file format:
//   {"nodes":[{"id":int,"children":[ids],"leaf":point-id}, ...],"root":id}
// "leaf" is present on leaves only. Nodes are written in ascending id order.
//
// `leaf_labels[p]` is the label written for point p (for example the row
// index in the ingested dataset). Without labels the point id is written.
std::string tree_to_json(const Dendrogram& tree, std::span<const std::uint64_t> leaf_labels = {});

struct ParsedTree {
    std::vector<NodeSpec> nodes;
    NodeId root = kNoNode;
    // Leaf labels in ascending order. After parse_tree_json() the `point` of
    // every leaf NodeSpec is its index in this list.
    std::vector<std::uint64_t> labels;
};

// Throws ParseError on malformed JSON or a schema mismatch. Structural
// problems (cycles, duplicate leaves) surface later in Dendrogram::from_nodes.
ParsedTree parse_tree_json(std::string_view text);

// Convenience: parse and build with colors indexed by compacted point id.
Dendrogram tree_from_json(std::string_view text, std::vector<Color> point_colors,
                          std::size_t num_colors);

}  // namespace fairhc
