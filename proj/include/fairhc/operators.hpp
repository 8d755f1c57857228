#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fairhc/dendrogram.hpp"

namespace fairhc {

// Subtree deletion at u followed by insertion at v.
//
// Removes T[u] from its parent P; if P is left with a single child s, s is
// contracted into P's place. A new node p is then spliced between v and v's
// parent with children {v, u}; when v is the root, p becomes the root.
// Returns p.
//
// Throws PreconditionError when u is the root, u has no sibling, v lies in
// T[u], v is u's parent, or v is a dummy.
NodeId del_ins(Dendrogram& tree, NodeId u, NodeId v);

// Replaces the sibling subtrees rooted at `roots` by one node whose children
// are the union of their children, in listed order; a listed leaf is hoisted
// as itself. The new node takes the slot of the first listed root under the
// common parent and is then binarized as a left comb. Returns its id.
//
// Throws PreconditionError for fewer than two roots, duplicates, dummies, or
// roots that do not share a parent.
NodeId shallow_fold(Dendrogram& tree, std::span<const NodeId> roots);

enum class SeparationKind { DelIns, Trivialize };

// Separations produced while one recursion frame rewrote its subtree. The
// pairs separated are those whose points shared a group in `before` (the
// frame root's children when the frame started) and ended in different groups
// of `after` (its children when the frame finished). Such a pair's lowest
// common ancestor moved up to the frame root, so its cluster size grew.
struct SeparationEvent {
    std::size_t level = 0;
    SeparationKind kind = SeparationKind::DelIns;
    NodeId frame_root = kNoNode;
    std::vector<std::vector<PointId>> before;
    std::vector<std::vector<PointId>> after;
};

// Append-only record of separation events. Pair-level views are materialized
// on demand; the log itself stores only leaf groups.
class SeparationLog {
public:
    void append(SeparationEvent event) { events_.push_back(std::move(event)); }
    std::span<const SeparationEvent> events() const { return events_; }
    bool empty() const { return events_.empty(); }

    static std::vector<std::pair<PointId, PointId>> separated_pairs(const SeparationEvent& event);

    struct PairAudit {
        std::size_t separated_pairs = 0;     // distinct pairs with any event
        std::size_t multi_level_pairs = 0;   // pairs separated at two or more levels
    };
    // Exhaustive pair-level scan. O(sum of squared frame sizes).
    PairAudit audit(std::size_t num_points) const;

private:
    std::vector<SeparationEvent> events_;
};

}  // namespace fairhc
