#include "fairhc/tree_json.hpp"

#include <algorithm>
#include <map>

#include "fairhc/error.hpp"
#include "json.hpp"

namespace fairhc {

using nlohmann::json;

std::string tree_to_json(const Dendrogram& tree, std::span<const std::uint64_t> leaf_labels) {
    if (!leaf_labels.empty() && leaf_labels.size() != tree.num_points()) {
        throw ShapeError("need one leaf label per point");
    }
    json nodes = json::array();
    for (NodeId v : tree.live_nodes()) {
        json node;
        node["id"] = v;
        node["children"] = std::vector<NodeId>(tree.children(v).begin(), tree.children(v).end());
        if (auto p = tree.point(v)) {
            node["leaf"] = leaf_labels.empty() ? std::uint64_t{*p} : leaf_labels[*p];
        }
        nodes.push_back(std::move(node));
    }
    json doc;
    doc["nodes"] = std::move(nodes);
    doc["root"] = tree.root();
    return doc.dump();
}

ParsedTree parse_tree_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("tree JSON: ") + e.what());
    }
    ParsedTree out;
    try {
        if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("root")) {
            throw ParseError("tree JSON needs \"nodes\" and \"root\"");
        }
        const auto& root = doc.at("root");
        if (!root.is_number_unsigned() && !(root.is_number_integer() && root.get<long long>() >= 0)) {
            throw ParseError("root must be a nonnegative integer");
        }
        out.root = root.get<NodeId>();
        std::map<std::uint64_t, std::size_t> label_index;
        for (const auto& n : doc.at("nodes")) {
            NodeSpec spec;
            const auto& id = n.at("id");
            if (!id.is_number_integer() || id.get<long long>() < 0 ||
                id.get<long long>() >= static_cast<long long>(kNoNode)) {
                throw ParseError("node id must be a nonnegative integer");
            }
            spec.id = id.get<NodeId>();
            if (n.contains("children")) {
                for (const auto& c : n.at("children")) {
                    if (!c.is_number_integer() || c.get<long long>() < 0) {
                        throw ParseError("child ids must be nonnegative integers");
                    }
                    spec.children.push_back(c.get<NodeId>());
                }
            }
            if (n.contains("leaf") && !n.at("leaf").is_null()) {
                const auto& leaf = n.at("leaf");
                if (!leaf.is_number_integer() || leaf.get<long long>() < 0) {
                    throw ParseError("leaf must be a nonnegative integer");
                }
                auto label = leaf.get<std::uint64_t>();
                spec.point = 0;
                label_index.emplace(label, 0);
                // Stash the raw label; compacted below.
                out.labels.push_back(label);
            }
            out.nodes.push_back(std::move(spec));
        }
        // Duplicate labels keep a single slot, so the duplicate surfaces as a
        // "point appears twice" error when the tree is built.
        std::vector<std::uint64_t> raw = std::move(out.labels);
        out.labels.clear();
        for (auto& [label, index] : label_index) {
            index = out.labels.size();
            out.labels.push_back(label);
        }
        std::size_t next = 0;
        for (auto& spec : out.nodes) {
            if (spec.point) {
                spec.point = static_cast<PointId>(label_index.at(raw[next++]));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("tree JSON: ") + e.what());
    }
    return out;
}

Dendrogram tree_from_json(std::string_view text, std::vector<Color> point_colors,
                          std::size_t num_colors) {
    ParsedTree parsed = parse_tree_json(text);
    if (parsed.labels.size() != point_colors.size()) {
        throw ShapeError("tree has " + std::to_string(parsed.labels.size()) +
                         " distinct leaves but " + std::to_string(point_colors.size()) +
                         " colors were given");
    }
    return Dendrogram::from_nodes(std::move(point_colors), num_colors, parsed.nodes,
                                  parsed.root);
}

}  // namespace fairhc
