#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/similarity_graph.hpp"
#include "json.hpp"

namespace fairhc {

// cost(fair) / cost(vanilla). Throws DegenerateInputError when the vanilla
// cost is zero.
double cost_ratio(const Dendrogram& vanilla, const Dendrogram& fair, const SimilarityGraph& graph);

// Fixed-width bins over [0, 1], right-closed: bin i holds (i/b, (i+1)/b] and
// bin 0 also holds 0.
struct Histogram {
    std::size_t bins = 50;
    Color color = 0;
    std::vector<std::uint64_t> counts;

    double midpoint(std::size_t i) const { return (static_cast<double>(i) + 0.5) / bins; }
    std::uint64_t total() const;
};

std::size_t histogram_bin(double value, std::size_t bins);

// Balance of `color` over every non-singleton cluster.
Histogram balance_histogram(const Dendrogram& tree, Color color, std::size_t bins = 50);

// Two columns, "bin_midpoint,count", one row per bin.
std::string histogram_csv(const Histogram& histogram);

struct RunParams {
    std::size_t h = 4;
    std::size_t k = 2;
    double eps = 0.0;
    double eps_c = 0.0;  // 0 when eps was given explicitly
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string dataset;
    std::vector<std::string> numeric_columns;
    std::string color_column;
    bool normalize = false;
};

struct RunReport {
    RunParams params;
    double cost_vanilla = 0.0;
    double cost_fair = 0.0;
    double ratio_cost = 0.0;
    Histogram histogram;
    std::vector<double> dataset_balance;
    nlohmann::json audit = nlohmann::json::object();
    std::map<std::string, double> timings_ms;
};

// Keys ordered as params, costs, histogram, dataset_balance, audit,
// timings_ms. Timings are omitted when `with_timings` is false, which makes
// reports of identical runs byte-identical.
nlohmann::ordered_json to_json(const RunReport& report, bool with_timings = true);

struct Aggregate {
    std::size_t replications = 0;
    double mean_ratio = 0.0;
    double stderr_ratio = 0.0;  // sample standard deviation / sqrt(m); 0 for m = 1
    double mean_cost_vanilla = 0.0;
    double mean_cost_fair = 0.0;
    Histogram histogram;        // bin-wise sums
    std::vector<std::uint64_t> seeds;
};

// Reports must agree on every parameter except the seed; otherwise
// AggregationError. The result does not depend on report order.
Aggregate aggregate(std::span<const RunReport> reports);
nlohmann::ordered_json to_json(const Aggregate& summary);

}  // namespace fairhc
