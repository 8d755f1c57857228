#include "fairhc/pipeline.hpp"

#include <chrono>
#include <utility>

#include "fairhc/cost.hpp"
#include "fairhc/error.hpp"
#include "fairhc/linkage.hpp"

namespace fairhc {

namespace {

// Keeps the error class so callers can still map it to an exit code.
[[noreturn]] void rethrow_in_phase(const std::string& phase, const Error& e) {
    const std::string msg = phase + ": " + e.what();
    if (dynamic_cast<const IngestError*>(&e)) throw IngestError(msg);
    if (dynamic_cast<const InputError*>(&e)) throw InputError(msg);
    if (dynamic_cast<const ParameterError*>(&e)) throw ParameterError(msg);
    if (dynamic_cast<const DegenerateInputError*>(&e)) throw DegenerateInputError(msg);
    throw InvariantError(msg);
}

// Runs `work`, adds its wall time to sink[phase] and tags errors with the phase.
template <typename F>
auto timed(std::map<std::string, double>& sink, const std::string& phase, F&& work)
    -> decltype(work()) {
    struct Stamp {
        std::map<std::string, double>& sink;
        const std::string& phase;
        std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
        ~Stamp() {
            const auto end = std::chrono::steady_clock::now();
            sink[phase] += std::chrono::duration<double, std::milli>(end - start).count();
        }
    } stamp{sink, phase};
    try {
        return work();
    } catch (const Error& e) {
        rethrow_in_phase(phase, e);
    }
}

}  // namespace

FairnessSpec default_spec(std::span<const double> proportions, const FairParams& params,
                          std::size_t depth) {
    return synthesize_fairness_spec(proportions, params, depth);
}

RunResult run_once(const Dataset& full, const RunConfig& config, std::uint64_t seed) {
    RunResult out;
    RunReport& report = out.report;
    auto& t = report.timings_ms;

    const std::size_t n = config.n == 0 ? full.size() : config.n;
    out.sample = timed(t, "subsample", [&] { return subsample(full, n, seed); });
    if (config.normalize) {
        normalize_min_max(out.sample);
    }

    FairParams params;
    params.h = config.h;
    params.k = config.k;
    params.eps = timed(t, "params", [&] {
        return config.eps ? *config.eps : eps_from_c(config.eps_c, n);
    });
    timed(t, "params", [&] { params.validate(out.sample.num_colors); });
    if (config.spec) {
        timed(t, "params", [&] { config.spec->validate(out.sample.num_colors); });
    }

    report.params.h = params.h;
    report.params.k = params.k;
    report.params.eps = params.eps;
    report.params.eps_c = config.eps ? 0.0 : config.eps_c;
    report.params.n = n;
    report.params.seed = seed;
    report.params.dataset = config.dataset_id;
    report.params.numeric_columns = config.numeric_columns;
    report.params.color_column = config.color_column;
    report.params.normalize = config.normalize;
    report.dataset_balance = out.sample.color_fractions();

    const SimilarityGraph graph =
        timed(t, "similarity", [&] { return build_similarity(out.sample); });
    out.vanilla = timed(t, "linkage", [&] {
        return average_linkage(graph, out.sample.colors, out.sample.num_colors);
    });
    out.fair = out.vanilla;
    out.outcome = timed(t, "make_fair", [&] { return make_fair(out.fair, params); });

    timed(t, "cost", [&] {
        report.cost_vanilla = total_cost(out.vanilla, graph);
        report.cost_fair = total_cost(out.fair, graph);
        if (report.cost_vanilla == 0.0) {
            throw DegenerateInputError("vanilla cost is zero; ratio undefined");
        }
        report.ratio_cost = report.cost_fair / report.cost_vanilla;
    });
    report.histogram = balance_histogram(out.fair, config.histogram_color, config.bins);

    timed(t, "audit", [&] {
        const FairnessSpec spec = config.spec ? *config.spec
                                              : default_spec(report.dataset_balance, params,
                                                             out.outcome.max_level);
        std::vector<std::uint32_t> expected(out.sample.num_colors, 0);
        for (Color c : out.sample.colors) {
            ++expected[c];
        }
        out.audit = audit_tree(out.fair, spec, params.eps, expected);
        const DriftAudit drift = audit_drift(out.fair, out.outcome, params);

        nlohmann::json audit = out.audit.to_json();
        audit["fairness_spec"] = {{"alpha", spec.alpha}, {"beta", spec.beta}};
        audit["drift_checked"] = drift.checked;
        audit["drift_failed"] = drift.failed;
        std::size_t base_frames = 0;
        std::size_t fallback_frames = 0;
        for (const auto& f : out.outcome.frames) {
            base_frames += f.base_case ? 1 : 0;
            fallback_frames += f.split_fallback ? 1 : 0;
        }
        audit["frames"] = out.outcome.frames.size();
        audit["base_case_frames"] = base_frames;
        audit["split_fallback_frames"] = fallback_frames;
        audit["max_level"] = out.outcome.max_level;

        bool separation_ok = true;
        if (n <= kSeparationAuditLimit) {
            const auto pairs = out.outcome.separations.audit(n);
            audit["separated_pairs"] = pairs.separated_pairs;
            audit["multi_level_pairs"] = pairs.multi_level_pairs;
            separation_ok = pairs.multi_level_pairs == 0;
        } else {
            audit["separated_pairs"] = nullptr;
            audit["multi_level_pairs"] = nullptr;
        }
        out.passed = out.audit.passed() && drift.failed == 0 && separation_ok;
        audit["passed"] = out.passed;
        report.audit = std::move(audit);
    });
    return out;
}

}  // namespace fairhc
