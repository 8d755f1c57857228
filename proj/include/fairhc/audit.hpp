#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/predicates.hpp"
#include "fairhc/tree_json.hpp"
#include "json.hpp"

namespace fairhc {

// Outcome of checking a finished hierarchy. Fairness violations at base-case
// nodes (every child a leaf) are listed separately and do not fail the audit.
struct AuditReport {
    std::vector<std::string> structure;
    std::vector<std::string> conservation;
    std::size_t balance_checked = 0;
    std::vector<NodeId> unbalanced;
    std::size_t clusters_checked = 0;
    std::vector<FairnessViolation> fairness;
    std::vector<FairnessViolation> base_case_fairness;

    bool passed() const {
        return structure.empty() && conservation.empty() && unbalanced.empty() &&
               fairness.empty();
    }
    nlohmann::json to_json() const;
};

// True when v is internal and all of its children are leaves.
bool is_base_case_node(const Dendrogram& tree, NodeId v);

// Cached-count and leaf-conservation checks, relative balance with slack
// `eps` at every non-base internal node, and fairness against `spec`.
// `expected_color_counts` is the per-color point count of the dataset.
AuditReport audit_tree(const Dendrogram& tree, const FairnessSpec& spec, double eps,
                       std::span<const std::uint32_t> expected_color_counts);

// Result of auditing a tree file against a dataset.
struct FileAudit {
    AuditReport report;
    std::optional<Dendrogram> tree;
};

// Matches the leaf labels of `parsed` against `expected_labels` (one label per
// dataset row, point i has label expected_labels[i]). Duplicate, missing and
// unknown labels are conservation violations; shape errors are structure
// violations. When both are clean the tree is built and passed on to
// audit_tree(); a null `spec` is synthesized by `make_spec` from the built tree.
FileAudit audit_tree_file(const ParsedTree& parsed, std::span<const std::uint64_t> expected_labels,
                          std::span<const Color> colors, std::size_t num_colors,
                          const std::optional<FairnessSpec>& spec, double eps,
                          const std::function<FairnessSpec(const Dendrogram&)>& make_spec);

// Largest depth of any internal node.
std::size_t internal_height(const Dendrogram& tree);

}  // namespace fairhc
