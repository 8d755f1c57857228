#include "fairhc/operators.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "fairhc/error.hpp"
#include "fairhc/predicates.hpp"

namespace fairhc {

NodeId del_ins(Dendrogram& tree, NodeId u, NodeId v) {
    auto parent = tree.parent(u);
    if (!parent) {
        throw PreconditionError("del_ins cannot delete the root");
    }
    if (!tree.contains(v) || tree.is_dummy(v)) {
        throw PreconditionError("del_ins target " + std::to_string(v) + " is not a real node");
    }
    if (tree.is_ancestor_or_self(u, v)) {
        throw PreconditionError("del_ins target lies inside the moved subtree");
    }
    if (v == *parent) {
        throw PreconditionError("del_ins target is the parent of the moved subtree");
    }
    if (tree.children(*parent).size() < 2) {
        throw PreconditionError("del_ins needs a sibling of the moved subtree");
    }

    tree.detach(u);
    if (tree.children(*parent).size() == 1) {
        tree.contract(*parent);
    }

    auto grand = tree.parent(v);
    if (!grand) {
        // v is the root; the new node adopts it and becomes the root.
        return tree.add_internal({v, u});
    }
    auto siblings = tree.children(*grand);
    const auto position = static_cast<std::size_t>(
        std::find(siblings.begin(), siblings.end(), v) - siblings.begin());
    tree.detach(v);
    NodeId p = tree.add_internal({v, u});
    tree.attach(*grand, p, position);
    return p;
}

NodeId shallow_fold(Dendrogram& tree, std::span<const NodeId> roots) {
    if (roots.size() < 2) {
        throw PreconditionError("shallow_fold needs at least two subtrees");
    }
    std::vector<NodeId> sorted(roots.begin(), roots.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw PreconditionError("shallow_fold received a subtree twice");
    }
    auto common = tree.parent(roots.front());
    if (!common) {
        throw PreconditionError("shallow_fold subtrees need a parent");
    }
    for (NodeId r : roots) {
        if (tree.is_dummy(r)) {
            throw PreconditionError("shallow_fold cannot fold a dummy");
        }
        if (tree.parent(r) != common) {
            throw PreconditionError("shallow_fold subtrees must share one parent");
        }
    }

    // Slot of the first listed root among the siblings that stay.
    auto siblings = tree.children(*common);
    std::size_t position = 0;
    for (NodeId s : siblings) {
        if (s == roots.front()) {
            break;
        }
        if (!std::binary_search(sorted.begin(), sorted.end(), s)) {
            ++position;
        }
    }

    std::vector<NodeId> hoisted;
    for (NodeId r : roots) {
        tree.detach(r);
        if (tree.is_leaf(r)) {
            hoisted.push_back(r);
            continue;
        }
        std::vector<NodeId> kids(tree.children(r).begin(), tree.children(r).end());
        for (NodeId c : kids) {
            tree.detach(c);
            hoisted.push_back(c);
        }
        tree.erase(r);
    }
    NodeId folded = tree.add_internal(hoisted);
    binarize_subtree(tree, folded);
    tree.attach(*common, folded, position);
    return folded;
}

std::vector<std::pair<PointId, PointId>> SeparationLog::separated_pairs(
    const SeparationEvent& event) {
    std::vector<std::pair<PointId, PointId>> out;
    std::vector<std::pair<PointId, std::size_t>> after_group;
    for (std::size_t g = 0; g < event.after.size(); ++g) {
        for (PointId p : event.after[g]) {
            after_group.emplace_back(p, g);
        }
    }
    std::sort(after_group.begin(), after_group.end());
    auto group_of = [&](PointId p) {
        auto it = std::lower_bound(after_group.begin(), after_group.end(),
                                   std::pair<PointId, std::size_t>(p, 0));
        return it != after_group.end() && it->first == p ? it->second : SIZE_MAX;
    };
    for (const auto& group : event.before) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            const std::size_t gi = group_of(group[i]);
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                if (group_of(group[j]) != gi) {
                    out.emplace_back(std::min(group[i], group[j]), std::max(group[i], group[j]));
                }
            }
        }
    }
    return out;
}

SeparationLog::PairAudit SeparationLog::audit(std::size_t num_points) const {
    constexpr std::int32_t kUnseen = -1;
    constexpr std::int32_t kMulti = -2;
    std::vector<std::int32_t> level_of(num_points * num_points, kUnseen);
    PairAudit result;
    for (const auto& event : events_) {
        for (auto [a, b] : separated_pairs(event)) {
            if (a >= num_points || b >= num_points) {
                throw ShapeError("separation event references unknown point");
            }
            auto& slot = level_of[std::size_t{a} * num_points + b];
            const auto level = static_cast<std::int32_t>(event.level);
            if (slot == kUnseen) {
                slot = level;
                ++result.separated_pairs;
            } else if (slot != level && slot != kMulti) {
                slot = kMulti;
                ++result.multi_level_pairs;
            }
        }
    }
    return result;
}

}  // namespace fairhc
