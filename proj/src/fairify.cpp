#include "fairhc/fairify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

#include "fairhc/error.hpp"

namespace fairhc {

void FairParams::validate(std::size_t num_colors) const {
    if (h < 2 || k < 2) {
        throw ParameterError("h and k must both be at least 2");
    }
    if (!(eps > 0.0 && eps < 0.5)) {
        throw ParameterError("eps must lie in (0, 1/2), got " + std::to_string(eps));
    }
    std::size_t power = 1;
    for (std::size_t i = 0; i < num_colors; ++i) {
        if (power > h / k) {
            throw ParameterError("h must be at least k^colors (h=" + std::to_string(h) +
                                 ", k=" + std::to_string(k) +
                                 ", colors=" + std::to_string(num_colors) + ")");
        }
        power *= k;
    }
}

double eps_from_c(double c, std::size_t n) {
    if (!(c > 0.0) || n < 2) {
        throw ParameterError("eps = 1/(c log2 n) needs c > 0 and n >= 2");
    }
    return 1.0 / (c * std::log2(static_cast<double>(n)));
}

std::size_t base_case_threshold(const FairParams& params) {
    const auto inverse = static_cast<std::size_t>(std::ceil(1.0 / params.eps));
    return std::max(2 * params.h, inverse);
}

std::size_t fold_rounds(const FairParams& params, std::size_t num_colors) {
    std::size_t count = params.h;
    std::size_t rounds = 0;
    for (std::size_t c = 0; c < num_colors; ++c) {
        if (count > params.k) {
            count = (count + params.k - 1) / params.k;
            ++rounds;
        }
    }
    return rounds;
}

namespace {

// Index of the first child with the largest leaf count.
std::size_t heaviest(const Dendrogram& tree, std::span<const NodeId> kids) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kids.size(); ++i) {
        if (tree.leaf_count(kids[i]) > tree.leaf_count(kids[best])) {
            best = i;
        }
    }
    return best;
}

std::size_t lightest(const Dendrogram& tree, std::span<const NodeId> kids, std::size_t skip) {
    std::size_t best = kids.size();
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i == skip) {
            continue;
        }
        if (best == kids.size() || tree.leaf_count(kids[i]) < tree.leaf_count(kids[best])) {
            best = i;
        }
    }
    return best;
}

double excess(const Dendrogram& tree, std::span<const NodeId> kids, double target) {
    double total = 0.0;
    for (NodeId c : kids) {
        total += std::max(0.0, static_cast<double>(tree.leaf_count(c)) - target);
    }
    return total;
}

}  // namespace

NodeId select_movable_subtree(const Dendrogram& tree, NodeId v_max, double cap) {
    if (static_cast<double>(tree.leaf_count(v_max)) <= cap) {
        throw PreconditionError("select_movable_subtree: node already fits under the cap");
    }
    NodeId cur = v_max;
    while (static_cast<double>(tree.leaf_count(cur)) > cap && !tree.is_leaf(cur)) {
        auto kids = tree.children(cur);
        cur = kids[heaviest(tree, kids)];
    }
    return cur;
}

NodeId find_insertion_point(const Dendrogram& tree, NodeId v_min, std::size_t incoming) {
    if (tree.is_dummy(v_min)) {
        return v_min;
    }
    NodeId cur = v_min;
    while (!tree.is_leaf(cur)) {
        auto kids = tree.children(cur);
        const std::size_t heavy = heaviest(tree, kids);
        const std::size_t light = lightest(tree, kids, heavy);
        if (tree.leaf_count(kids[light]) < incoming) {
            return kids[light];
        }
        cur = kids[heavy];
    }
    return cur;
}

SplitReport split_root(Dendrogram& tree, NodeId root, std::size_t h, double eps) {
    if (h < 2) {
        throw ParameterError("split_root needs h >= 2");
    }
    if (tree.is_leaf(root) || tree.is_dummy(root)) {
        throw PreconditionError("split_root needs an internal node");
    }
    if (tree.children(root).size() > h) {
        throw PreconditionError("split_root root already has more than h children");
    }
    const std::size_t n = tree.leaf_count(root);
    if (n < h) {
        throw TooSmallError("cannot split " + std::to_string(n) + " leaves into " +
                            std::to_string(h) + " parts");
    }

    SplitReport report;
    report.leaves = n;
    report.h = h;
    report.eps = eps;

    while (tree.children(root).size() < h) {
        tree.attach(root, tree.add_dummy());
    }

    const double N = static_cast<double>(n);
    const double target = N / static_cast<double>(h);
    const double lo_int = std::floor(target);
    const double hi_int = std::ceil(target);
    // Distance of every child from the nearest integral share; zero means no
    // move can improve the split.
    auto integer_gap = [&](std::span<const NodeId> kids) {
        double gap = 0.0;
        for (NodeId c : kids) {
            const double s = static_cast<double>(tree.leaf_count(c));
            gap += std::max({0.0, lo_int - s, s - hi_int});
        }
        return gap;
    };

    for (;;) {
        auto kids = tree.children(root);
        const bool has_dummy = std::any_of(kids.begin(), kids.end(),
                                           [&](NodeId c) { return tree.is_dummy(c); });
        if (!has_dummy && is_relatively_balanced(tree, root, eps)) {
            break;
        }
        const std::size_t imax = heaviest(tree, kids);
        std::size_t imin = 0;
        for (std::size_t i = 1; i < kids.size(); ++i) {
            if (tree.leaf_count(kids[i]) < tree.leaf_count(kids[imin])) {
                imin = i;
            }
        }
        const NodeId v_max = kids[imax];
        const NodeId v_min = kids[imin];
        const double n_max = static_cast<double>(tree.leaf_count(v_max));
        const double n_min = static_cast<double>(tree.leaf_count(v_min));

        SplitMove move;
        move.target = target;
        move.delta_min = (target - n_min) / N;
        move.delta_max = (n_max - target) / N;
        move.delta = std::min(move.delta_min, move.delta_max);
        double cap = move.delta * N;
        if (cap < 1.0) {
            if (integer_gap(kids) == 0.0) {
                throw TooSmallError("split of " + std::to_string(n) +
                                    " leaves is as even as integers allow but not within eps");
            }
            cap = std::min(hi_int - n_min, n_max - lo_int);
            if (cap < 1.0) {
                throw TooSmallError("no whole subtree can move toward balance");
            }
            move.rounded = true;
            move.delta = cap / N;
        }
        if (report.moves.size() > 4 * n + h) {
            throw InvariantError("split_root failed to converge");
        }

        move.excess_before = excess(tree, kids, target);
        const NodeId u = select_movable_subtree(tree, v_max, cap);
        move.moved = u;
        move.moved_size = tree.leaf_count(u);
        if (tree.is_dummy(v_min)) {
            auto parent = *tree.parent(u);
            tree.detach(u);
            if (tree.children(parent).size() == 1) {
                tree.contract(parent);
            }
            tree.replace_child(root, v_min, u);
            tree.erase(v_min);
            move.inserted_at = v_min;
        } else {
            const NodeId at = find_insertion_point(tree, v_min, move.moved_size);
            del_ins(tree, u, at);
            move.inserted_at = at;
        }
        move.excess_after = excess(tree, tree.children(root), target);
        report.moves.push_back(move);
    }
    return report;
}

std::vector<NodeId> fold_by_color(Dendrogram& tree, std::span<const NodeId> children,
                                  Color color, std::size_t k) {
    if (k < 1 || children.size() < k) {
        throw ParameterError("fold_by_color needs at least k children");
    }
    if (color >= tree.num_colors()) {
        throw ParameterError("fold_by_color: unknown color " + std::to_string(color));
    }
    std::vector<NodeId> order(children.begin(), children.end());
    // Exact comparison of count_a / size_a against count_b / size_b.
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        const std::uint64_t ca = tree.color_counts(a)[color];
        const std::uint64_t cb = tree.color_counts(b)[color];
        const std::uint64_t na = tree.leaf_count(a);
        const std::uint64_t nb = tree.leaf_count(b);
        const std::uint64_t lhs = ca * nb;
        const std::uint64_t rhs = cb * na;
        if (lhs != rhs) {
            return lhs < rhs;
        }
        return a < b;
    });

    const std::size_t m = order.size();
    const std::size_t base = m / k;
    const std::size_t extra = m % k;
    std::vector<std::size_t> start(k + 1, 0);
    for (std::size_t c = 0; c < k; ++c) {
        start[c + 1] = start[c] + base + (c < extra ? 1 : 0);
    }
    const std::size_t groups = (m + k - 1) / k;

    std::vector<NodeId> out;
    out.reserve(groups);
    for (std::size_t i = 0; i < groups; ++i) {
        std::vector<NodeId> group;
        for (std::size_t c = 0; c < k; ++c) {
            if (start[c] + i < start[c + 1]) {
                group.push_back(order[start[c] + i]);
            }
        }
        out.push_back(group.size() >= 2 ? shallow_fold(tree, group) : group.front());
    }
    return out;
}

namespace {

std::vector<std::vector<PointId>> child_groups(const Dendrogram& tree, NodeId v) {
    std::vector<std::vector<PointId>> groups;
    for (NodeId c : tree.children(v)) {
        groups.push_back(tree.leaves_under(c));
    }
    return groups;
}

// Removes every internal node below v and hangs its leaves directly from v,
// in their previous depth-first order.
void trivialize(Dendrogram& tree, NodeId v) {
    std::vector<PointId> points = tree.leaves_under(v);
    std::vector<NodeId> pending(tree.children(v).begin(), tree.children(v).end());
    for (NodeId c : pending) {
        tree.detach(c);
    }
    while (!pending.empty()) {
        NodeId d = pending.back();
        pending.pop_back();
        if (tree.is_leaf(d)) {
            continue;
        }
        std::vector<NodeId> kids(tree.children(d).begin(), tree.children(d).end());
        for (NodeId c : kids) {
            tree.detach(c);
            pending.push_back(c);
        }
        tree.erase(d);
    }
    for (PointId p : points) {
        tree.attach(v, tree.leaf_of(p));
    }
}

}  // namespace

FairOutcome make_fair(Dendrogram& tree, const FairParams& params, const MakeFairOptions& options) {
    params.validate(tree.num_colors());
    if (tree.num_points() == 0 || tree.root() == kNoNode) {
        throw InputError("make_fair needs a non-empty tree");
    }
    tree.validate();
    if (!tree.is_binary()) {
        binarize_subtree(tree, tree.root());
    }

    const std::size_t threshold = base_case_threshold(params);
    std::size_t members = 1;
    for (std::size_t r = 0; r < fold_rounds(params, tree.num_colors()); ++r) {
        members *= params.k;
    }
    const double split_eps = params.eps / static_cast<double>(members);

    FairOutcome outcome;
    if (tree.is_leaf(tree.root())) {
        return outcome;
    }

    std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
    while (!stack.empty()) {
        auto [v, level] = stack.back();
        stack.pop_back();

        FrameRecord frame;
        frame.node = v;
        frame.level = level;
        frame.size = tree.leaf_count(v);
        for (std::uint32_t count : tree.color_counts(v)) {
            frame.proportions.push_back(static_cast<double>(count) /
                                        static_cast<double>(frame.size));
        }
        frame.split_eps = split_eps;
        if (options.observer) {
            options.observer(tree, frame, FramePhase::Begin);
        }

        SeparationEvent event;
        event.level = level;
        event.frame_root = v;
        event.before = child_groups(tree, v);

        if (frame.size < threshold) {
            frame.base_case = true;
        } else {
            try {
                frame.split = split_root(tree, v, params.h, split_eps);
            } catch (const TooSmallError&) {
                frame.base_case = true;
                frame.split_fallback = true;
            }
        }

        if (frame.base_case) {
            trivialize(tree, v);
            event.kind = SeparationKind::Trivialize;
        } else {
            std::vector<NodeId> kids(tree.children(v).begin(), tree.children(v).end());
            for (Color c = 0; c < tree.num_colors(); ++c) {
                if (kids.size() > params.k) {
                    kids = fold_by_color(tree, kids, c, params.k);
                }
            }
            event.kind = SeparationKind::DelIns;
        }
        event.after = child_groups(tree, v);
        outcome.separations.append(std::move(event));

        frame.children.assign(tree.children(v).begin(), tree.children(v).end());
        outcome.max_level = std::max(outcome.max_level, level);
        if (options.observer) {
            options.observer(tree, frame, FramePhase::End);
        }
        if (!frame.base_case) {
            for (auto it = frame.children.rbegin(); it != frame.children.rend(); ++it) {
                if (!tree.is_leaf(*it)) {
                    stack.emplace_back(*it, level + 1);
                }
            }
        }
        outcome.frames.push_back(std::move(frame));
    }
    return outcome;
}

DriftFactors drift_factors(double proportion, const FairParams& params) {
    DriftFactors f;
    const double e = params.eps;
    const double h = static_cast<double>(params.h);
    const double k = static_cast<double>(params.k);
    if (proportion <= 0.0) {
        // A missing color cannot appear in any child.
        f.lower = 0.0;
        f.upper = 0.0;
        return f;
    }
    f.lower = std::max(0.0, (1.0 - e) / ((1.0 + e) * (1.0 + e)) *
                                (1.0 - k * (1.0 + e) / (proportion * h)));
    f.upper = (1.0 + e) / ((1.0 - e) * (1.0 - e)) * (1.0 + (1.0 - e) / (proportion * k));
    return f;
}

DriftAudit audit_drift(const Dendrogram& tree, const FairOutcome& outcome,
                       const FairParams& params) {
    constexpr double kSlack = 1e-12;
    DriftAudit audit;
    for (const auto& frame : outcome.frames) {
        if (frame.base_case) {
            continue;
        }
        for (NodeId child : frame.children) {
            for (Color c = 0; c < frame.proportions.size(); ++c) {
                const double p = frame.proportions[c];
                const DriftFactors f = drift_factors(p, params);
                const double b = cluster_balance(tree, child, c);
                ++audit.checked;
                if (b < f.lower * p - kSlack || b > f.upper * p + kSlack) {
                    ++audit.failed;
                }
            }
        }
    }
    return audit;
}

FairnessSpec synthesize_fairness_spec(std::span<const double> proportions,
                                      const FairParams& params, std::size_t depth) {
    FairnessSpec spec;
    const double d = static_cast<double>(depth);
    for (double p : proportions) {
        const DriftFactors f = drift_factors(p, params);
        spec.alpha.push_back(std::clamp(p * std::pow(f.lower, d), 0.0, 1.0));
        spec.beta.push_back(std::clamp(p * std::pow(f.upper, d), 0.0, 1.0));
    }
    return spec;
}

}  // namespace fairhc
