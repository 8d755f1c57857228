#include "fairhc/linkage.hpp"

#include <utility>

#include "fairhc/error.hpp"

namespace fairhc {

namespace {

// Candidate pair ordered by (similarity desc, smaller id asc, larger id asc).
struct Candidate {
    double value = -1.0;
    NodeId lo = kNoNode;
    NodeId hi = kNoNode;
    std::size_t slot = 0;

    bool beats(const Candidate& other) const {
        if (value != other.value) {
            return value > other.value;
        }
        return std::pair(lo, hi) < std::pair(other.lo, other.hi);
    }
};

class AverageLinkage {
public:
    explicit AverageLinkage(const SimilarityGraph& graph)
        : n_(graph.size()),
          sums_(n_ * n_),
          ids_(n_),
          sizes_(n_, 1),
          active_(n_, true),
          best_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            ids_[i] = static_cast<NodeId>(i);
            for (std::size_t j = 0; j < n_; ++j) {
                sums_[i * n_ + j] = i == j ? 0.0 : graph.weight(i, j);
            }
        }
        for (std::size_t i = 0; i < n_; ++i) {
            rescan(i);
        }
    }

    std::vector<Merge> run() {
        std::vector<Merge> merges;
        merges.reserve(n_ - 1);
        for (std::size_t step = 0; step + 1 < n_; ++step) {
            std::size_t a = n_;
            for (std::size_t s = 0; s < n_; ++s) {
                if (active_[s] && (a == n_ || best_[s].beats(best_[a]))) {
                    a = s;
                }
            }
            const Candidate pick = best_[a];
            std::size_t b = pick.slot;
            merges.push_back({pick.lo, pick.hi, pick.value});
            merge_slots(a, b, static_cast<NodeId>(n_ + step));
        }
        return merges;
    }

private:
    double average(std::size_t s, std::size_t t) const {
        return sums_[s * n_ + t] /
               (static_cast<double>(sizes_[s]) * static_cast<double>(sizes_[t]));
    }

    Candidate candidate(std::size_t s, std::size_t t) const {
        Candidate c;
        c.value = average(s, t);
        c.lo = std::min(ids_[s], ids_[t]);
        c.hi = std::max(ids_[s], ids_[t]);
        c.slot = t;
        return c;
    }

    void rescan(std::size_t s) {
        Candidate best;
        bool found = false;
        for (std::size_t t = 0; t < n_; ++t) {
            if (t == s || !active_[t]) {
                continue;
            }
            Candidate c = candidate(s, t);
            if (!found || c.beats(best)) {
                best = c;
                found = true;
            }
        }
        best_[s] = best;
    }

    void merge_slots(std::size_t keep, std::size_t drop, NodeId new_id) {
        for (std::size_t x = 0; x < n_; ++x) {
            if (!active_[x] || x == keep || x == drop) {
                continue;
            }
            double merged = sums_[keep * n_ + x] + sums_[drop * n_ + x];
            sums_[keep * n_ + x] = merged;
            sums_[x * n_ + keep] = merged;
        }
        sizes_[keep] += sizes_[drop];
        ids_[keep] = new_id;
        active_[drop] = false;
        for (std::size_t x = 0; x < n_; ++x) {
            if (!active_[x] || x == keep) {
                continue;
            }
            if (best_[x].slot == keep || best_[x].slot == drop) {
                rescan(x);
            } else {
                Candidate c = candidate(x, keep);
                if (c.beats(best_[x])) {
                    best_[x] = c;
                }
            }
        }
        rescan(keep);
    }

    std::size_t n_;
    std::vector<double> sums_;
    std::vector<NodeId> ids_;
    std::vector<std::size_t> sizes_;
    std::vector<bool> active_;
    std::vector<Candidate> best_;
};

}  // namespace

std::vector<Merge> average_linkage_merges(const SimilarityGraph& graph) {
    if (graph.size() < 2) {
        throw InputError("average linkage needs at least two points");
    }
    return AverageLinkage(graph).run();
}

Dendrogram average_linkage(const SimilarityGraph& graph, std::vector<Color> point_colors,
                           std::size_t num_colors) {
    if (point_colors.size() != graph.size()) {
        throw ShapeError("one color per graph vertex required");
    }
    std::vector<Merge> merges = average_linkage_merges(graph);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(merges.size());
    for (const auto& m : merges) {
        pairs.emplace_back(m.first, m.second);
    }
    return Dendrogram::from_merges(std::move(point_colors), num_colors, pairs);
}

}  // namespace fairhc
