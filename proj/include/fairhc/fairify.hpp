#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/operators.hpp"
#include "fairhc/predicates.hpp"

namespace fairhc {

// h: split arity, k: fold width, eps: balance slack.
struct FairParams {
    std::size_t h = 4;
    std::size_t k = 2;
    double eps = 0.0;

    // Throws ParameterError unless h, k >= 2, 0 < eps < 1/2 and h >= k^colors.
    void validate(std::size_t num_colors) const;
};

// eps = 1 / (c * log2 n), the parameterization used by the experiments.
double eps_from_c(double c, std::size_t n);

// Subtrees smaller than this are given a trivial topology:
// max(2h, ceil(1/eps)).
std::size_t base_case_threshold(const FairParams& params);

// Number of fold rounds a frame performs after splitting into h children.
// A round for a color runs only while more than k children remain, so a
// frame never collapses to a single child.
std::size_t fold_rounds(const FairParams& params, std::size_t num_colors);

// One subtree move inside split_root.
struct SplitMove {
    double target = 0.0;       // n / h
    double delta_min = 0.0;    // deviation of the smallest child, as a fraction of n
    double delta_max = 0.0;    // deviation of the largest child, as a fraction of n
    double delta = 0.0;        // min of the two; cap = delta * n
    bool rounded = false;      // cap taken from the integer-rounded target
    std::size_t moved_size = 0;
    double excess_before = 0.0;  // sum over children of max(0, size - target)
    double excess_after = 0.0;
    NodeId moved = kNoNode;
    NodeId inserted_at = kNoNode;
};

struct SplitReport {
    std::size_t leaves = 0;
    std::size_t h = 0;
    double eps = 0.0;
    std::vector<SplitMove> moves;

    std::size_t iterations() const { return moves.size(); }
};

// Gives `root` exactly h children, then moves subtrees from the largest
// child to the smallest until the root is eps-relatively balanced and no
// placeholder child is left. Below the root the subtree must be binary.
//
// Each move takes at most delta * n leaves, where delta is the smaller of the
// two extreme children's deviations from n/h. When that cap falls under one
// leaf (only possible for fractional n/h) the deviations are measured against
// floor/ceil of n/h instead.
//
// Throws TooSmallError when the subtree cannot be balanced at integer
// granularity; the tree is left valid but partially rewritten.
SplitReport split_root(Dendrogram& tree, NodeId root, std::size_t h, double eps);

// Walks down from v_max through the heavier child (first child on ties) and
// returns the first node with at most `cap` leaves.
NodeId select_movable_subtree(const Dendrogram& tree, NodeId v_max, double cap);

// Where a subtree of `incoming` leaves is inserted below v_min: a dummy is
// returned as-is; otherwise walk down through heavier children until the
// lighter child has fewer than `incoming` leaves and return that child (or
// the leaf reached).
NodeId find_insertion_point(const Dendrogram& tree, NodeId v_min, std::size_t incoming);

// Sorts `children` by their fraction of `color` (ties: ascending node id),
// cuts the order into k contiguous chunks whose sizes differ by at most one
// (larger chunks first), and shallow-folds the i-th members of all chunks.
// Returns one node per fold group in group order; a group with a single
// member is left as it is. Throws ParameterError when fewer than k children
// are given.
std::vector<NodeId> fold_by_color(Dendrogram& tree, std::span<const NodeId> children,
                                  Color color, std::size_t k);

// One processed subtree of make_fair.
struct FrameRecord {
    NodeId node = kNoNode;
    std::size_t level = 0;
    std::size_t size = 0;
    std::vector<double> proportions;  // per color, for the frame's leaves
    bool base_case = false;           // given a trivial topology
    bool split_fallback = false;      // base case reached through TooSmallError
    double split_eps = 0.0;
    SplitReport split;
    std::vector<NodeId> children;  // children of `node` when the frame ended
};

enum class FramePhase { Begin, End };

struct MakeFairOptions {
    // Called with the tree at the start and end of every frame.
    std::function<void(const Dendrogram&, const FrameRecord&, FramePhase)> observer;
};

struct FairOutcome {
    std::vector<FrameRecord> frames;
    SeparationLog separations;
    std::size_t max_level = 0;
};

// Top-down rewrite of `tree` into a fair, relatively balanced hierarchy.
//
// Each frame either gives a small subtree a trivial topology or splits the
// subtree root into h balanced children and, for each color in ascending
// order, folds those children k at a time across the color-sorted order.
// The remaining children are processed as frames of the next level. The split
// runs with slack eps / k^rounds so that every folded child stays within
// eps of an equal share.
//
// A non-binary input is binarized first. Throws ParameterError for invalid
// params and InputError for an empty tree.
FairOutcome make_fair(Dendrogram& tree, const FairParams& params,
                      const MakeFairOptions& options = {});

// Per-level proportion drift allowed for one color: a child of a frame whose
// color fraction is `proportion` must lie in [lower, upper] * proportion.
struct DriftFactors {
    double lower = 0.0;
    double upper = 1.0;
};
DriftFactors drift_factors(double proportion, const FairParams& params);

// Checks every non-base frame's final children against drift_factors().
// Returns the number of (child, color) checks that failed.
struct DriftAudit {
    std::size_t checked = 0;
    std::size_t failed = 0;
};
DriftAudit audit_drift(const Dendrogram& tree, const FairOutcome& outcome,
                       const FairParams& params);

// Fairness bounds compounded over `depth` levels from the dataset-wide color
// proportions, clamped to [0, 1].
FairnessSpec synthesize_fairness_spec(std::span<const double> proportions,
                                      const FairParams& params, std::size_t depth);

}  // namespace fairhc
