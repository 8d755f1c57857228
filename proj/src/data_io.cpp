#include "fairhc/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "fairhc/error.hpp"

namespace fairhc {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) {
        return false;
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Uniform integer in [0, bound) by rejection; mt19937_64 output is portable,
// std::uniform_int_distribution is not.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t x = rng();
        if (x < limit) {
            return x % bound;
        }
    }
}

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    // Box-Muller; 1 - u keeps the log argument positive.
    const double u1 = 1.0 - unit(rng);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

std::map<std::string, std::uint32_t> parse_color_map(const std::vector<std::string>& pairs) {
    std::map<std::string, std::uint32_t> map;
    std::set<std::uint32_t> ids;
    for (const auto& entry : pairs) {
        auto eq = entry.rfind('=');
        if (eq == std::string::npos) {
            throw IngestError("color map entry '" + entry + "' is not value=colorId");
        }
        std::string value = trim(std::string_view(entry).substr(0, eq));
        std::string id_text = trim(std::string_view(entry).substr(eq + 1));
        std::uint32_t id = 0;
        auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc() || ptr != id_text.data() + id_text.size() || id == 0) {
            throw IngestError("color id in '" + entry + "' must be a positive integer");
        }
        if (!map.emplace(value, id).second) {
            throw IngestError("color value '" + value + "' mapped twice");
        }
        ids.insert(id);
    }
    if (map.empty()) {
        throw IngestError("empty color map");
    }
    if (*ids.rbegin() != ids.size()) {
        throw IngestError("color ids must cover 1..max without gaps");
    }
    return map;
}

std::vector<double> Dataset::color_fractions() const {
    std::vector<double> out(num_colors, 0.0);
    for (Color c : colors) {
        out[c] += 1.0;
    }
    for (double& f : out) {
        f /= static_cast<double>(std::max<std::size_t>(1, size()));
    }
    return out;
}

Dataset load_csv(const IngestConfig& config) {
    std::ifstream in(config.path);
    if (!in) {
        throw IngestError("cannot open " + config.path);
    }
    return read_csv(in, config);
}

Dataset read_csv(std::istream& in, const IngestConfig& config) {
    if (config.numeric_columns.empty()) {
        throw IngestError("at least one numeric column is required");
    }
    if (config.color_map.empty()) {
        throw IngestError("a color map is required");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IngestError("missing header row");
    }
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw IngestError("column '" + name + "' not found");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    std::vector<std::size_t> numeric;
    for (const auto& name : config.numeric_columns) {
        numeric.push_back(column(name));
    }
    const std::size_t color_col = column(config.color_column);

    Dataset data;
    data.columns = config.numeric_columns;
    data.dims = numeric.size();
    for (const auto& [value, id] : config.color_map) {
        data.num_colors = std::max<std::size_t>(data.num_colors, id);
    }

    std::uint64_t row_index = 0;
    std::vector<double> values(numeric.size());
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        const std::uint64_t this_row = row_index++;
        const auto fields = split_csv_line(line);
        bool usable = color_col < fields.size();
        for (std::size_t j = 0; usable && j < numeric.size(); ++j) {
            usable = numeric[j] < fields.size() && parse_number(fields[numeric[j]], values[j]);
        }
        if (!usable) {
            ++data.dropped_rows;
            continue;
        }
        auto it = config.color_map.find(fields[color_col]);
        if (it == config.color_map.end()) {
            throw IngestError("row " + std::to_string(this_row) + ": color value '" +
                              fields[color_col] + "' is not in the color map");
        }
        data.features.insert(data.features.end(), values.begin(), values.end());
        data.colors.push_back(it->second - 1);
        data.source_rows.push_back(this_row);
    }
    if (data.colors.empty()) {
        throw IngestError("no usable rows");
    }
    return data;
}

std::vector<std::size_t> color_quotas(const Dataset& data, std::size_t n) {
    std::vector<std::size_t> available(data.num_colors, 0);
    for (Color c : data.colors) {
        ++available[c];
    }
    const std::size_t total = data.size();
    std::vector<std::size_t> quota(data.num_colors);
    std::vector<std::pair<std::uint64_t, Color>> remainders;
    std::size_t assigned = 0;
    for (Color c = 0; c < data.num_colors; ++c) {
        // Exact integer arithmetic: n * available / total.
        const std::uint64_t scaled = static_cast<std::uint64_t>(n) * available[c];
        quota[c] = scaled / total;
        remainders.emplace_back(scaled % total, c);
        assigned += quota[c];
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n; ++i) {
        ++quota[remainders[i].second];
        ++assigned;
    }
    for (Color c = 0; c < data.num_colors; ++c) {
        if (quota[c] > available[c]) {
            throw InputError("quota for color " + std::to_string(c + 1) + " exceeds its rows");
        }
    }
    return quota;
}

Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed) {
    if (n > data.size()) {
        throw InputError("cannot sample " + std::to_string(n) + " rows from " +
                         std::to_string(data.size()));
    }
    const auto quota = color_quotas(data, n);
    std::vector<std::vector<std::size_t>> by_color(data.num_colors);
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_color[data.colors[i]].push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen;
    for (Color c = 0; c < data.num_colors; ++c) {
        auto& pool = by_color[c];
        // Partial Fisher-Yates: the first quota[c] slots form the sample.
        for (std::size_t i = 0; i < quota[c]; ++i) {
            std::size_t j = i + bounded(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + quota[c]);
    }
    std::sort(chosen.begin(), chosen.end());

    Dataset out;
    out.columns = data.columns;
    out.dims = data.dims;
    out.num_colors = data.num_colors;
    out.dropped_rows = data.dropped_rows;
    for (std::size_t i : chosen) {
        out.features.insert(out.features.end(), data.row(i), data.row(i) + data.dims);
        out.colors.push_back(data.colors[i]);
        out.source_rows.push_back(data.source_rows[i]);
    }
    return out;
}

void normalize_min_max(Dataset& data) {
    for (std::size_t j = 0; j < data.dims; ++j) {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (std::size_t i = 0; i < data.size(); ++i) {
            lo = std::min(lo, data.features[i * data.dims + j]);
            hi = std::max(hi, data.features[i * data.dims + j]);
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double& x = data.features[i * data.dims + j];
            x = span > 0.0 ? (x - lo) / span : 0.0;
        }
    }
}

SimilarityGraph build_similarity(const Dataset& data) {
    SimilarityGraph graph(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = i + 1; j < data.size(); ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < data.dims; ++d) {
                const double diff = data.row(i)[d] - data.row(j)[d];
                sq += diff * diff;
            }
            graph.set_weight(i, j, 1.0 / (1.0 + std::sqrt(sq)));
        }
    }
    return graph;
}

void write_synthetic_census(std::ostream& out, std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<bool> nonwhite(rows, false);
    std::fill(nonwhite.begin(), nonwhite.begin() + static_cast<std::ptrdiff_t>(rows / 8), true);
    for (std::size_t i = rows; i > 1; --i) {
        std::size_t j = bounded(rng, i);
        bool tmp = nonwhite[i - 1];
        nonwhite[i - 1] = nonwhite[j];
        nonwhite[j] = tmp;
    }
    auto clamp_round = [](double x, double lo, double hi) {
        return std::clamp(std::round(x), lo, hi);
    };
    out << "age,fnlwgt,education-num,capital-gain,capital-loss,hours-per-week,race\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const double age = clamp_round(38.6 + 13.6 * gaussian(rng), 17, 90);
        const double fnlwgt = clamp_round(std::exp(12.0 + 0.5 * gaussian(rng)), 12000, 1500000);
        const double edu = clamp_round(10.1 + 2.6 * gaussian(rng), 1, 16);
        double gain = 0.0;
        if (unit(rng) < 0.08) {
            gain = std::round(-std::log(1.0 - unit(rng)) * 12000.0);
        }
        double loss = 0.0;
        if (unit(rng) < 0.05) {
            loss = clamp_round(1870.0 + 400.0 * gaussian(rng), 100, 4400);
        }
        const double hours = clamp_round(40.4 + 12.3 * gaussian(rng), 1, 99);
        out << age << ',' << static_cast<long long>(fnlwgt) << ',' << edu << ','
            << static_cast<long long>(gain) << ',' << loss << ',' << hours << ','
            << (nonwhite[i] ? "nonwhite" : "white") << '\n';
    }
}

IngestConfig synthetic_census_config() {
    IngestConfig config;
    config.numeric_columns = {"age",          "fnlwgt",       "education-num",
                              "capital-gain", "capital-loss", "hours-per-week"};
    config.color_column = "race";
    config.color_map = {{"nonwhite", 1}, {"white", 2}};
    return config;
}

}  // namespace fairhc
