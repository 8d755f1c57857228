#include "fairhc/audit.hpp"

#include <algorithm>
#include <map>

#include "fairhc/error.hpp"

namespace fairhc {

namespace {

const char* rule_name(FairnessViolation::Rule rule) {
    switch (rule) {
        case FairnessViolation::Rule::LowerBound:
            return "lower_bound";
        case FairnessViolation::Rule::UpperBound:
            return "upper_bound";
        case FairnessViolation::Rule::LeafChildMix:
            return "leaf_child_mix";
    }
    return "unknown";
}

nlohmann::json violations_json(const std::vector<FairnessViolation>& list) {
    auto out = nlohmann::json::array();
    for (const auto& v : list) {
        out.push_back({{"node", v.node},
                       {"rule", rule_name(v.rule)},
                       {"color", v.color + 1},
                       {"balance", v.balance}});
    }
    return out;
}

}  // namespace

nlohmann::json AuditReport::to_json() const {
    return {{"passed", passed()},
            {"structure", structure},
            {"conservation", conservation},
            {"balance_checked", balance_checked},
            {"unbalanced_nodes", unbalanced},
            {"clusters_checked", clusters_checked},
            {"fairness_violations", violations_json(fairness)},
            {"base_case_fairness_violations", violations_json(base_case_fairness)}};
}

bool is_base_case_node(const Dendrogram& tree, NodeId v) {
    if (tree.is_leaf(v)) {
        return false;
    }
    auto kids = tree.children(v);
    return std::all_of(kids.begin(), kids.end(), [&](NodeId c) { return tree.is_leaf(c); });
}

std::size_t internal_height(const Dendrogram& tree) {
    std::size_t best = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        if (tree.is_leaf(v)) {
            continue;
        }
        best = std::max(best, d);
        for (NodeId c : tree.children(v)) {
            stack.emplace_back(c, d + 1);
        }
    }
    return best;
}

AuditReport audit_tree(const Dendrogram& tree, const FairnessSpec& spec, double eps,
                       std::span<const std::uint32_t> expected_color_counts) {
    AuditReport report;
    for (auto& problem : tree.check()) {
        report.structure.push_back(std::move(problem));
    }
    if (!report.structure.empty()) {
        return report;
    }

    std::vector<int> seen(tree.num_points(), 0);
    for (PointId p : tree.leaves_under(tree.root())) {
        ++seen[p];
    }
    for (PointId p = 0; p < seen.size(); ++p) {
        if (seen[p] != 1) {
            report.conservation.push_back("point " + std::to_string(p) + " appears " +
                                          std::to_string(seen[p]) + " times");
        }
    }
    auto counts = tree.color_counts(tree.root());
    if (!std::equal(counts.begin(), counts.end(), expected_color_counts.begin(),
                    expected_color_counts.end())) {
        report.conservation.push_back("root color counts differ from the dataset");
    }

    for (NodeId v : tree.internal_nodes()) {
        if (is_base_case_node(tree, v)) {
            continue;
        }
        ++report.balance_checked;
        if (!is_relatively_balanced(tree, v, eps)) {
            report.unbalanced.push_back(v);
        }
    }

    report.clusters_checked = tree.internal_nodes().size();
    for (auto& violation : is_fair(tree, spec).violations) {
        if (is_base_case_node(tree, violation.node)) {
            report.base_case_fairness.push_back(violation);
        } else {
            report.fairness.push_back(violation);
        }
    }
    return report;
}

FileAudit audit_tree_file(const ParsedTree& parsed, std::span<const std::uint64_t> expected_labels,
                          std::span<const Color> colors, std::size_t num_colors,
                          const std::optional<FairnessSpec>& spec, double eps,
                          const std::function<FairnessSpec(const Dendrogram&)>& make_spec) {
    FileAudit out;
    if (colors.size() != expected_labels.size()) {
        throw ShapeError("one color per expected label required");
    }
    std::map<std::uint64_t, PointId> point_of;
    for (PointId p = 0; p < expected_labels.size(); ++p) {
        point_of.emplace(expected_labels[p], p);
    }

    // parse_tree_json() compacts labels, so recover each leaf's raw label.
    std::map<std::uint64_t, std::size_t> occurrences;
    std::vector<NodeSpec> nodes = parsed.nodes;
    for (auto& node : nodes) {
        if (!node.point) {
            continue;
        }
        const std::uint64_t label = parsed.labels.at(*node.point);
        ++occurrences[label];
        auto it = point_of.find(label);
        if (it == point_of.end()) {
            out.report.conservation.push_back("leaf label " + std::to_string(label) +
                                              " is not a dataset row");
        } else {
            node.point = it->second;
        }
    }
    for (const auto& [label, count] : occurrences) {
        if (count > 1) {
            out.report.conservation.push_back("leaf label " + std::to_string(label) +
                                              " appears " + std::to_string(count) + " times");
        }
    }
    for (std::uint64_t label : expected_labels) {
        if (!occurrences.count(label)) {
            out.report.conservation.push_back("dataset row " + std::to_string(label) +
                                              " has no leaf");
        }
    }
    if (!out.report.conservation.empty()) {
        return out;
    }

    try {
        out.tree = Dendrogram::from_nodes(std::vector<Color>(colors.begin(), colors.end()),
                                          num_colors, nodes, parsed.root);
    } catch (const ShapeError& e) {
        out.report.structure.push_back(e.what());
        return out;
    }
    std::vector<std::uint32_t> expected(num_colors, 0);
    for (Color c : colors) {
        ++expected[c];
    }
    const FairnessSpec used = spec ? *spec : make_spec(*out.tree);
    out.report = audit_tree(*out.tree, used, eps, expected);
    return out;
}

}  // namespace fairhc
