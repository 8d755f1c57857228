#pragma once

#include <string>
#include <vector>

#include "fairhc/dendrogram.hpp"

namespace fairhc {

// Per-color bounds on the fraction of every non-singleton cluster.
struct FairnessSpec {
    std::vector<double> alpha;
    std::vector<double> beta;

    // Throws ParameterError unless both vectors have one entry per color,
    // lie in [0, 1] and alpha <= beta elementwise.
    void validate(std::size_t num_colors) const;
};

// Checks |c_v * n(child) - n(v)| <= c_v * eps * n(v) for every child, which is
// the relative-balance condition multiplied through by the child count.
// Throws InvalidNodeError for leaves.
bool is_relatively_balanced(const Dendrogram& tree, NodeId v, double eps);

// Fraction of the leaves under v that carry `color`.
double cluster_balance(const Dendrogram& tree, NodeId v, Color color);

struct FairnessViolation {
    enum class Rule { LowerBound, UpperBound, LeafChildMix };
    NodeId node = kNoNode;
    Rule rule = Rule::LowerBound;
    Color color = 0;
    double balance = 0.0;

    std::string describe() const;
};

struct FairnessResult {
    bool fair = true;
    std::vector<FairnessViolation> violations;
};

// Every non-singleton cluster must respect the bounds of every color, and a
// node with a leaf child may only have leaf children.
FairnessResult is_fair(const Dendrogram& tree, const FairnessSpec& spec);

// Copy of `tree` in which every node with more than two children is replaced
// by a left comb over its children in their existing order. Never increases
// the cost under any nonnegative similarity.
Dendrogram binarize(Dendrogram tree);

// In-place variant restricted to the subtree under `v`. The node `v` keeps its
// id and becomes the top of its comb.
void binarize_subtree(Dendrogram& tree, NodeId v);

}  // namespace fairhc
