#include "fairhc/predicates.hpp"

#include <cmath>
#include <sstream>

#include "fairhc/error.hpp"

namespace fairhc {

namespace {

constexpr double kRelTol = 1e-12;

}  // namespace

void FairnessSpec::validate(std::size_t num_colors) const {
    if (alpha.size() != num_colors || beta.size() != num_colors) {
        throw ParameterError("fairness spec needs one alpha and one beta per color");
    }
    for (std::size_t l = 0; l < num_colors; ++l) {
        if (!(alpha[l] >= 0.0 && alpha[l] <= 1.0 && beta[l] >= 0.0 && beta[l] <= 1.0)) {
            throw ParameterError("fairness bounds must lie in [0, 1]");
        }
        if (alpha[l] > beta[l]) {
            throw ParameterError("alpha exceeds beta for color " + std::to_string(l + 1));
        }
    }
}

bool is_relatively_balanced(const Dendrogram& tree, NodeId v, double eps) {
    if (tree.is_leaf(v)) {
        throw InvalidNodeError("relative balance is undefined on leaf " + std::to_string(v));
    }
    auto kids = tree.children(v);
    if (kids.empty()) {
        throw InvalidNodeError("node " + std::to_string(v) + " has no children");
    }
    const double c = static_cast<double>(kids.size());
    const double total = static_cast<double>(tree.leaf_count(v));
    const double slack = c * eps * total * (1.0 + kRelTol) + kRelTol;
    for (NodeId k : kids) {
        const double scaled = c * static_cast<double>(tree.leaf_count(k));
        if (std::abs(scaled - total) > slack) {
            return false;
        }
    }
    return true;
}

double cluster_balance(const Dendrogram& tree, NodeId v, Color color) {
    if (color >= tree.num_colors()) {
        throw InvalidNodeError("color " + std::to_string(color) + " out of range");
    }
    const std::size_t n = tree.leaf_count(v);
    if (n == 0) {
        throw InvalidNodeError("balance of empty node " + std::to_string(v));
    }
    return static_cast<double>(tree.color_counts(v)[color]) / static_cast<double>(n);
}

std::string FairnessViolation::describe() const {
    std::ostringstream out;
    out << "node " << node << ": ";
    switch (rule) {
        case Rule::LowerBound:
            out << "color " << color + 1 << " below lower bound (balance " << balance << ")";
            break;
        case Rule::UpperBound:
            out << "color " << color + 1 << " above upper bound (balance " << balance << ")";
            break;
        case Rule::LeafChildMix:
            out << "has both leaf and internal children";
            break;
    }
    return out.str();
}

FairnessResult is_fair(const Dendrogram& tree, const FairnessSpec& spec) {
    spec.validate(tree.num_colors());
    FairnessResult result;
    for (NodeId v : tree.internal_nodes()) {
        const std::size_t size = tree.leaf_count(v);
        if (size < 2) {
            continue;
        }
        const double n = static_cast<double>(size);
        auto counts = tree.color_counts(v);
        for (Color l = 0; l < tree.num_colors(); ++l) {
            const double have = static_cast<double>(counts[l]);
            const double tol = kRelTol * n;
            if (have < spec.alpha[l] * n - tol) {
                result.violations.push_back(
                    {v, FairnessViolation::Rule::LowerBound, l, have / n});
            }
            if (have > spec.beta[l] * n + tol) {
                result.violations.push_back(
                    {v, FairnessViolation::Rule::UpperBound, l, have / n});
            }
        }
        bool any_leaf = false;
        bool all_leaf = true;
        for (NodeId c : tree.children(v)) {
            const bool leaf = tree.is_leaf(c);
            any_leaf = any_leaf || leaf;
            all_leaf = all_leaf && leaf;
        }
        if (any_leaf && !all_leaf) {
            result.violations.push_back({v, FairnessViolation::Rule::LeafChildMix, 0, 0.0});
        }
    }
    result.fair = result.violations.empty();
    return result;
}

void binarize_subtree(Dendrogram& tree, NodeId v) {
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        auto kids_span = tree.children(u);
        std::vector<NodeId> kids(kids_span.begin(), kids_span.end());
        for (NodeId c : kids) {
            if (!tree.is_leaf(c)) {
                stack.push_back(c);
            }
        }
        if (kids.size() <= 2) {
            continue;
        }
        // u keeps the last child and takes a comb over the others:
        // (((c1, c2), c3), ..., c_{m-1}), c_m.
        for (NodeId c : kids) {
            tree.detach(c);
        }
        NodeId comb = tree.add_internal({kids[0], kids[1]});
        for (std::size_t i = 2; i + 1 < kids.size(); ++i) {
            comb = tree.add_internal({comb, kids[i]});
        }
        tree.attach(u, comb);
        tree.attach(u, kids.back());
    }
}

Dendrogram binarize(Dendrogram tree) {
    binarize_subtree(tree, tree.root());
    return tree;
}

}  // namespace fairhc
