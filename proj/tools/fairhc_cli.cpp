// fairhc: average-linkage hierarchy, fair rewrite, cost ratio and audits.
//
//   fairhc run   --input data.csv --numeric-cols a,b --color-col g --color-map x=1 --color-map y=2
//   fairhc audit --tree tree.json  (same dataset flags as run)
//   fairhc synth --rows 30000 --out census_like.csv

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fairhc/audit.hpp"
#include "fairhc/data_io.hpp"
#include "fairhc/error.hpp"
#include "fairhc/pipeline.hpp"
#include "fairhc/tree_json.hpp"

using namespace fairhc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInvariant = 3 };

struct DatasetFlags {
    std::string input;
    std::vector<std::string> numeric_cols;
    std::string color_col;
    std::vector<std::string> color_map;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    bool normalize = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--input", input, "CSV file with a header row")->required();
        cmd->add_option("--numeric-cols", numeric_cols, "numeric feature columns")
            ->required()
            ->delimiter(',');
        cmd->add_option("--color-col", color_col, "column holding the protected attribute")
            ->required();
        cmd->add_option("--color-map", color_map, "value=colorId pairs, ids from 1")
            ->required()
            ->delimiter(',');
        cmd->add_option("--n", n, "sample size (default: all rows)");
        cmd->add_option("--seed", seed, "base seed; replication r uses seed + r");
        cmd->add_flag("--normalize", normalize, "min-max scale features before distances");
    }

    Dataset load() const {
        IngestConfig cfg;
        cfg.path = input;
        cfg.numeric_columns = numeric_cols;
        cfg.color_column = color_col;
        cfg.color_map = parse_color_map(color_map);
        return load_csv(cfg);
    }
};

struct FairFlags {
    std::size_t h = 4;
    std::size_t k = 2;
    double eps_c = 8.0;
    std::optional<double> eps;
    std::vector<double> alpha;
    std::vector<double> beta;

    void add_to(CLI::App* cmd) {
        // --h is the split arity, so help is only reachable as --help.
        cmd->set_help_flag("--help", "print help and exit");
        cmd->add_option("--h", h, "split arity")->capture_default_str();
        cmd->add_option("--k", k, "fold width")->capture_default_str();
        cmd->add_option("--eps-c", eps_c, "eps = 1 / (c log2 n)")->capture_default_str();
        cmd->add_option("--eps", eps, "explicit eps, overrides --eps-c");
        cmd->add_option("--alpha", alpha, "per-color lower bounds")->delimiter(',');
        cmd->add_option("--beta", beta, "per-color upper bounds")->delimiter(',');
    }

    std::optional<FairnessSpec> spec() const {
        if (alpha.empty() && beta.empty()) {
            return std::nullopt;
        }
        return FairnessSpec{alpha, beta};
    }
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IngestError("cannot write " + path);
    }
    out << text << '\n';
}

std::string basename_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

int run_command(const DatasetFlags& data, const FairFlags& fair, std::size_t replications,
                std::size_t bins, std::size_t histogram_color, bool strict,
                const std::string& out_path, const std::string& tree_path,
                const std::string& vanilla_path, const std::string& csv_path) {
    const Dataset full = data.load();

    RunConfig cfg;
    cfg.dataset_id = basename_of(data.input);
    cfg.numeric_columns = data.numeric_cols;
    cfg.color_column = data.color_col;
    cfg.n = data.n;
    cfg.h = fair.h;
    cfg.k = fair.k;
    cfg.eps_c = fair.eps_c;
    cfg.eps = fair.eps;
    cfg.spec = fair.spec();
    cfg.bins = bins;
    if (histogram_color < 1 || histogram_color > full.num_colors) {
        throw ParameterError("--histogram-color must name a mapped color");
    }
    cfg.histogram_color = static_cast<Color>(histogram_color - 1);
    cfg.normalize = data.normalize;

    std::vector<RunReport> reports;
    bool all_passed = true;
    for (std::size_t r = 0; r < replications; ++r) {
        RunResult result = run_once(full, cfg, data.seed + r);
        all_passed = all_passed && result.passed;
        if (r == 0) {
            if (!tree_path.empty()) {
                write_text(tree_path, tree_to_json(result.fair, result.sample.source_rows));
            }
            if (!vanilla_path.empty()) {
                write_text(vanilla_path, tree_to_json(result.vanilla, result.sample.source_rows));
            }
        }
        reports.push_back(std::move(result.report));
    }

    nlohmann::ordered_json doc;
    if (replications == 1) {
        doc = to_json(reports.front());
    } else {
        const Aggregate summary = aggregate(reports);
        doc["aggregate"] = to_json(summary);
        doc["reports"] = nlohmann::ordered_json::array();
        for (const auto& r : reports) {
            doc["reports"].push_back(to_json(r));
        }
    }
    write_text(out_path, doc.dump(2));
    if (!csv_path.empty()) {
        Histogram h = replications == 1 ? reports.front().histogram : aggregate(reports).histogram;
        std::ofstream csv(csv_path);
        if (!csv) {
            throw IngestError("cannot write " + csv_path);
        }
        csv << histogram_csv(h);
    }
    if (!all_passed) {
        std::cerr << "fairhc: invariant audit failed (see \"audit\" in the report)\n";
        return strict ? kInvariant : kOk;
    }
    return kOk;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int audit_command(const DatasetFlags& data, const FairFlags& fair, const std::string& tree_path,
                  const std::string& out_path) {
    const Dataset full = data.load();
    const Dataset sample = data.n == 0 ? full : subsample(full, data.n, data.seed);
    const ParsedTree parsed = parse_tree_json(read_file(tree_path));

    FairParams params;
    params.h = fair.h;
    params.k = fair.k;
    params.eps = fair.eps ? *fair.eps : eps_from_c(fair.eps_c, sample.size());
    params.validate(sample.num_colors);
    const auto proportions = sample.color_fractions();
    auto make_spec = [&](const Dendrogram& tree) {
        return default_spec(proportions, params, internal_height(tree));
    };
    const auto spec = fair.spec();
    if (spec) {
        spec->validate(sample.num_colors);
    }
    FileAudit result = audit_tree_file(parsed, sample.source_rows, sample.colors,
                                       sample.num_colors, spec, params.eps, make_spec);

    nlohmann::ordered_json doc;
    doc["tree"] = tree_path;
    doc["eps"] = params.eps;
    doc["audit"] = result.report.to_json();
    write_text(out_path, doc.dump(2));
    for (const auto& s : result.report.structure) {
        std::cerr << "structure: " << s << '\n';
    }
    for (const auto& s : result.report.conservation) {
        std::cerr << "conservation: " << s << '\n';
    }
    for (NodeId v : result.report.unbalanced) {
        std::cerr << "balance: node " << v << " is not eps-relatively balanced\n";
    }
    for (const auto& v : result.report.fairness) {
        std::cerr << "fairness: " << v.describe() << '\n';
    }
    return result.report.passed() ? kOk : kInvariant;
}

// One JSON line on stderr so scripts can tell failure kinds apart.
int report_error(const char* kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair hierarchical clustering: run, audit, synth"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help and exit");

    DatasetFlags run_data;
    FairFlags run_fair;
    std::size_t replications = 1;
    std::size_t bins = 50;
    std::size_t histogram_color = 1;
    bool no_strict = false;
    std::string out_path = "-";
    std::string tree_path;
    std::string vanilla_path;
    std::string csv_path;
    auto* run = app.add_subcommand("run", "cluster, rewrite fairly and report");
    run_data.add_to(run);
    run_fair.add_to(run);
    run->add_option("--replications", replications, "independent seeded runs")
        ->check(CLI::PositiveNumber);
    run->add_option("--bins", bins, "histogram bins on [0,1]")->check(CLI::PositiveNumber);
    run->add_option("--histogram-color", histogram_color, "color id for the histogram");
    run->add_option("--out", out_path, "report JSON path, - for stdout");
    run->add_option("--emit-tree", tree_path, "write the fair tree of replication 0");
    run->add_option("--emit-vanilla-tree", vanilla_path, "write the average-linkage tree");
    run->add_option("--histogram-csv", csv_path, "write bin_midpoint,count CSV");
    run->add_flag("--no-strict", no_strict, "exit 0 even when the audit fails");

    DatasetFlags audit_data;
    FairFlags audit_fair;
    std::string audit_tree_path;
    std::string audit_out = "-";
    auto* audit = app.add_subcommand("audit", "check a tree file against its dataset");
    audit_data.add_to(audit);
    audit_fair.add_to(audit);
    audit->add_option("--tree", audit_tree_path, "tree JSON")->required();
    audit->add_option("--out", audit_out, "audit JSON path, - for stdout");

    std::size_t synth_rows = 30000;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "-";
    auto* synth = app.add_subcommand("synth", "write a Census-like CSV (1:7 nonwhite:white)");
    synth->add_option("--rows", synth_rows, "rows")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "CSV path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            return run_command(run_data, run_fair, replications, bins, histogram_color,
                               !no_strict, out_path, tree_path, vanilla_path, csv_path);
        }
        if (*audit) {
            return audit_command(audit_data, audit_fair, audit_tree_path, audit_out);
        }
        if (synth_out == "-") {
            write_synthetic_census(std::cout, synth_rows, synth_seed);
        } else {
            std::ofstream out(synth_out);
            if (!out) {
                throw IngestError("cannot write " + synth_out);
            }
            write_synthetic_census(out, synth_rows, synth_seed);
        }
        return kOk;
    } catch (const ParameterError& e) {
        return report_error("usage", e.what(), kUsage);
    } catch (const InvariantError& e) {
        return report_error("invariant", e.what(), kInvariant);
    } catch (const Error& e) {
        return report_error("data", e.what(), kData);
    }
}
