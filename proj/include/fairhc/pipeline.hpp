#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fairhc/audit.hpp"
#include "fairhc/data_io.hpp"
#include "fairhc/dendrogram.hpp"
#include "fairhc/fairify.hpp"
#include "fairhc/metrics.hpp"

namespace fairhc {

struct RunConfig {
    std::string dataset_id;
    std::vector<std::string> numeric_columns;
    std::string color_column;
    std::size_t n = 0;  // 0: use every row
    std::size_t h = 4;
    std::size_t k = 2;
    double eps_c = 8.0;
    std::optional<double> eps;  // overrides eps_c
    std::optional<FairnessSpec> spec;
    std::size_t bins = 50;
    Color histogram_color = 0;
    bool normalize = false;
};

// Everything one replication produced. Trees are indexed by sample row.
struct RunResult {
    RunReport report;
    Dataset sample;
    Dendrogram vanilla;
    Dendrogram fair;
    FairOutcome outcome;
    AuditReport audit;
    bool passed = false;  // tree audit, drift bounds and single-level separation
};

// Pair-level separation audit needs n^2 counters; above this it is skipped.
inline constexpr std::size_t kSeparationAuditLimit = 4096;

// Subsample -> similarity -> average linkage -> make_fair -> metrics and
// audit, for one seed. Errors carry a "phase: " prefix.
RunResult run_once(const Dataset& full, const RunConfig& config, std::uint64_t seed);

// Dataset-wide bounds for a finished run: the drift factors compounded over
// the deepest recursion level.
FairnessSpec default_spec(std::span<const double> proportions, const FairParams& params,
                          std::size_t depth);

}  // namespace fairhc
