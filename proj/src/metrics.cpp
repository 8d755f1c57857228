#include "fairhc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fairhc/cost.hpp"
#include "fairhc/error.hpp"
#include "fairhc/predicates.hpp"

namespace fairhc {

double cost_ratio(const Dendrogram& vanilla, const Dendrogram& fair, const SimilarityGraph& graph) {
    const double base = total_cost(vanilla, graph);
    if (base == 0.0) {
        throw DegenerateInputError("vanilla cost is zero; ratio undefined");
    }
    return total_cost(fair, graph) / base;
}

std::uint64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t histogram_bin(double value, std::size_t bins) {
    if (bins == 0) {
        throw ParameterError("histogram needs at least one bin");
    }
    if (value <= 0.0) {
        return 0;
    }
    const double scaled = value * static_cast<double>(bins);
    auto bin = static_cast<std::size_t>(std::ceil(scaled));
    // Right-closed: a value exactly on an edge belongs to the lower bin.
    return std::min(bins, std::max<std::size_t>(bin, 1)) - 1;
}

Histogram balance_histogram(const Dendrogram& tree, Color color, std::size_t bins) {
    Histogram h;
    h.bins = bins;
    h.color = color;
    h.counts.assign(bins, 0);
    for (NodeId v : tree.internal_nodes()) {
        if (tree.leaf_count(v) < 2) {
            continue;
        }
        ++h.counts[histogram_bin(cluster_balance(tree, v, color), bins)];
    }
    return h;
}

std::string histogram_csv(const Histogram& histogram) {
    std::ostringstream out;
    out << "bin_midpoint,count\n";
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        out << histogram.midpoint(i) << ',' << histogram.counts[i] << '\n';
    }
    return out.str();
}

namespace {

nlohmann::ordered_json params_json(const RunParams& p) {
    nlohmann::ordered_json j;
    j["h"] = p.h;
    j["k"] = p.k;
    j["eps"] = p.eps;
    if (p.eps_c > 0.0) {
        j["eps_c"] = p.eps_c;
    }
    j["n"] = p.n;
    j["seed"] = p.seed;
    j["dataset"] = p.dataset;
    j["numeric_columns"] = p.numeric_columns;
    j["color_column"] = p.color_column;
    j["normalize"] = p.normalize;
    return j;
}

nlohmann::ordered_json histogram_json(const Histogram& h) {
    nlohmann::ordered_json j;
    j["bins"] = h.bins;
    j["color"] = h.color + 1;
    j["counts"] = h.counts;
    return j;
}

bool same_except_seed(const RunParams& a, const RunParams& b) {
    return a.h == b.h && a.k == b.k && a.eps == b.eps && a.eps_c == b.eps_c && a.n == b.n &&
           a.dataset == b.dataset && a.numeric_columns == b.numeric_columns &&
           a.color_column == b.color_column && a.normalize == b.normalize;
}

double sorted_mean(std::vector<double> values) {
    // Summing in sorted order makes the result independent of input order.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

nlohmann::ordered_json to_json(const RunReport& report, bool with_timings) {
    nlohmann::ordered_json j;
    j["params"] = params_json(report.params);
    j["cost_vanilla"] = report.cost_vanilla;
    j["cost_fair"] = report.cost_fair;
    j["ratio_cost"] = report.ratio_cost;
    j["histogram"] = histogram_json(report.histogram);
    j["dataset_balance"] = report.dataset_balance;
    j["audit"] = report.audit;
    if (with_timings) {
        j["timings_ms"] = report.timings_ms;
    }
    return j;
}

Aggregate aggregate(std::span<const RunReport> reports) {
    if (reports.empty()) {
        throw AggregationError("nothing to aggregate");
    }
    const RunReport& first = reports.front();
    for (const auto& r : reports) {
        if (!same_except_seed(r.params, first.params) ||
            r.histogram.bins != first.histogram.bins ||
            r.histogram.color != first.histogram.color) {
            throw AggregationError("reports were produced with different parameters");
        }
    }
    Aggregate out;
    out.replications = reports.size();
    std::vector<double> ratios;
    std::vector<double> vanilla;
    std::vector<double> fair;
    out.histogram.bins = first.histogram.bins;
    out.histogram.color = first.histogram.color;
    out.histogram.counts.assign(first.histogram.bins, 0);
    for (const auto& r : reports) {
        ratios.push_back(r.ratio_cost);
        vanilla.push_back(r.cost_vanilla);
        fair.push_back(r.cost_fair);
        out.seeds.push_back(r.params.seed);
        for (std::size_t i = 0; i < r.histogram.counts.size(); ++i) {
            out.histogram.counts[i] += r.histogram.counts[i];
        }
    }
    std::sort(out.seeds.begin(), out.seeds.end());
    out.mean_ratio = sorted_mean(ratios);
    out.mean_cost_vanilla = sorted_mean(vanilla);
    out.mean_cost_fair = sorted_mean(fair);
    if (ratios.size() > 1) {
        std::vector<double> sq;
        for (double r : ratios) {
            sq.push_back((r - out.mean_ratio) * (r - out.mean_ratio));
        }
        const double m = static_cast<double>(ratios.size());
        const double variance = sorted_mean(sq) * m / (m - 1.0);
        out.stderr_ratio = std::sqrt(variance / m);
    }
    return out;
}

nlohmann::ordered_json to_json(const Aggregate& summary) {
    nlohmann::ordered_json j;
    j["replications"] = summary.replications;
    j["seeds"] = summary.seeds;
    j["mean_ratio_cost"] = summary.mean_ratio;
    j["stderr_ratio_cost"] = summary.stderr_ratio;
    j["mean_cost_vanilla"] = summary.mean_cost_vanilla;
    j["mean_cost_fair"] = summary.mean_cost_fair;
    j["histogram"] = histogram_json(summary.histogram);
    return j;
}

}  // namespace fairhc
