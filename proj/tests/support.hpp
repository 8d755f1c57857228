#pragma once

// Generators and independent oracles shared by the test binaries. The oracles
// deliberately avoid the cached counts and fast paths of the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/linkage.hpp"
#include "fairhc/similarity_graph.hpp"

namespace testsupport {

using namespace fairhc;

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<Color> random_colors(std::size_t n, std::size_t num_colors,
                                        std::mt19937_64& rng) {
    std::vector<Color> colors(n);
    for (auto& c : colors) {
        c = static_cast<Color>(uniform(rng, 0, num_colors - 1));
    }
    return colors;
}

// Random binary tree: repeatedly joins two uniformly chosen clusters.
inline Dendrogram random_binary_tree(std::vector<Color> colors, std::size_t num_colors,
                                     std::mt19937_64& rng) {
    const std::size_t n = colors.size();
    std::vector<NodeId> active(n);
    for (std::size_t i = 0; i < n; ++i) {
        active[i] = static_cast<NodeId>(i);
    }
    std::vector<std::pair<NodeId, NodeId>> merges;
    NodeId next = static_cast<NodeId>(n);
    while (active.size() > 1) {
        std::size_t a = uniform(rng, 0, active.size() - 1);
        std::size_t b = uniform(rng, 0, active.size() - 2);
        if (b >= a) {
            ++b;
        }
        merges.emplace_back(active[a], active[b]);
        active[std::min(a, b)] = next++;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
    }
    return Dendrogram::from_merges(std::move(colors), num_colors, merges);
}

// Random tree with internal nodes of 2..max_arity children.
inline Dendrogram random_tree(std::vector<Color> colors, std::size_t num_colors,
                              std::size_t max_arity, std::mt19937_64& rng) {
    Dendrogram tree(std::move(colors), num_colors);
    std::vector<NodeId> active;
    for (std::size_t i = 0; i < tree.num_points(); ++i) {
        active.push_back(static_cast<NodeId>(i));
    }
    std::shuffle(active.begin(), active.end(), rng);
    while (active.size() > 1) {
        std::size_t arity = std::min(active.size(), uniform(rng, 2, max_arity));
        std::vector<NodeId> group(active.end() - static_cast<std::ptrdiff_t>(arity), active.end());
        active.resize(active.size() - arity);
        NodeId v = tree.add_internal(group);
        active.insert(active.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, active.size())),
                      v);
    }
    tree.set_root(active.front());
    return tree;
}

inline Dendrogram left_comb(std::vector<Color> colors, std::size_t num_colors) {
    const std::size_t n = colors.size();
    std::vector<std::pair<NodeId, NodeId>> merges;
    NodeId acc = 0;
    for (std::size_t i = 1; i < n; ++i) {
        merges.emplace_back(acc, static_cast<NodeId>(i));
        acc = static_cast<NodeId>(n + i - 1);
    }
    return Dendrogram::from_merges(std::move(colors), num_colors, merges);
}

inline Dendrogram complete_binary(std::vector<Color> colors, std::size_t num_colors) {
    std::vector<std::pair<NodeId, NodeId>> merges;
    std::vector<NodeId> level;
    for (std::size_t i = 0; i < colors.size(); ++i) {
        level.push_back(static_cast<NodeId>(i));
    }
    NodeId next = static_cast<NodeId>(colors.size());
    while (level.size() > 1) {
        std::vector<NodeId> up;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            merges.emplace_back(level[i], level[i + 1]);
            up.push_back(next++);
        }
        if (level.size() % 2 == 1) {
            up.push_back(level.back());
        }
        level = std::move(up);
    }
    return Dendrogram::from_merges(std::move(colors), num_colors, merges);
}

// Weights in (0, 1]. With `dyadic` they are multiples of 1/64, so every sum
// is exact and ties are frequent.
inline SimilarityGraph random_graph(std::size_t n, std::mt19937_64& rng, bool dyadic = false) {
    SimilarityGraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = dyadic ? static_cast<double>(uniform(rng, 1, 64)) / 64.0
                              : std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
            g.set_weight(i, j, w);
        }
    }
    return g;
}

// Point sets of every live node, computed from child links only.
inline std::map<NodeId, std::set<PointId>> leaf_sets(const Dendrogram& tree) {
    std::map<NodeId, std::set<PointId>> sets;
    std::vector<std::pair<NodeId, bool>> stack{{tree.root(), false}};
    while (!stack.empty()) {
        auto [v, done] = stack.back();
        stack.pop_back();
        if (!done) {
            stack.emplace_back(v, true);
            for (NodeId c : tree.children(v)) {
                stack.emplace_back(c, false);
            }
            continue;
        }
        auto& s = sets[v];
        if (auto p = tree.point(v)) {
            s.insert(*p);
        }
        for (NodeId c : tree.children(v)) {
            s.insert(sets[c].begin(), sets[c].end());
        }
    }
    return sets;
}

// Dasgupta cost by brute force: for each pair, the smallest leaf set holding
// both points.
inline double brute_force_cost(const Dendrogram& tree, const SimilarityGraph& graph) {
    const auto sets = leaf_sets(tree);
    double total = 0.0;
    const std::size_t n = tree.num_points();
    for (PointId i = 0; i < n; ++i) {
        for (PointId j = i + 1; j < n; ++j) {
            std::size_t best = SIZE_MAX;
            for (const auto& [v, s] : sets) {
                if (s.size() < best && s.count(i) && s.count(j)) {
                    best = s.size();
                }
            }
            total += graph.weight(i, j) * static_cast<double>(best);
        }
    }
    return total;
}

// True when cached leaf and color counts agree with a fresh recount.
inline bool counts_match_recount(const Dendrogram& tree) {
    for (const auto& [v, s] : leaf_sets(tree)) {
        if (tree.leaf_count(v) != s.size()) {
            return false;
        }
        std::vector<std::uint32_t> colors(tree.num_colors(), 0);
        for (PointId p : s) {
            ++colors[tree.color_of(p)];
        }
        auto cached = tree.color_counts(v);
        if (!std::equal(colors.begin(), colors.end(), cached.begin(), cached.end())) {
            return false;
        }
    }
    return true;
}

// Sorted leaf multiset together with per-color totals at the root.
struct LeafCensus {
    std::vector<PointId> points;
    std::vector<std::uint32_t> colors;
    bool operator==(const LeafCensus&) const = default;
};

inline LeafCensus census(const Dendrogram& tree) {
    LeafCensus c;
    c.points = tree.leaves_under(tree.root());
    std::sort(c.points.begin(), c.points.end());
    c.colors.assign(tree.num_colors(), 0);
    for (PointId p : c.points) {
        ++c.colors[tree.color_of(p)];
    }
    return c;
}

// Average linkage recomputed from the raw weights at every step: O(n^3) per
// step overall O(n^4) worst case, fine for n <= 64. Same tie rule as the
// library: larger average first, then smaller (min id, max id).
inline std::vector<Merge> naive_average_linkage(const SimilarityGraph& graph) {
    const std::size_t n = graph.size();
    std::vector<std::vector<PointId>> members(n);
    std::vector<NodeId> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {static_cast<PointId>(i)};
        ids[i] = static_cast<NodeId>(i);
    }
    std::vector<Merge> merges;
    NodeId next = static_cast<NodeId>(n);
    while (members.size() > 1) {
        double best = -1.0;
        std::size_t ba = 0;
        std::size_t bb = 0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                double sum = 0.0;
                for (PointId x : members[a]) {
                    for (PointId y : members[b]) {
                        sum += graph.weight(x, y);
                    }
                }
                const double avg = sum / (static_cast<double>(members[a].size()) *
                                          static_cast<double>(members[b].size()));
                auto key = std::pair(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
                auto best_key = std::pair(std::min(ids[ba], ids[bb]), std::max(ids[ba], ids[bb]));
                if (avg > best || (avg == best && key < best_key)) {
                    best = avg;
                    ba = a;
                    bb = b;
                }
            }
        }
        merges.push_back({std::min(ids[ba], ids[bb]), std::max(ids[ba], ids[bb]), best});
        members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
        ids[ba] = next++;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(bb));
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    return merges;
}

}  // namespace testsupport
