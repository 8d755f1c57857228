#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fairhc/dendrogram.hpp"
#include "fairhc/similarity_graph.hpp"

namespace fairhc {

struct IngestConfig {
    std::string path;
    std::vector<std::string> numeric_columns;
    std::string color_column;
    // Raw column value -> 1-based color id.
    std::map<std::string, std::uint32_t> color_map;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t replications = 1;
};

// Parses "value=colorId" pairs. Color ids are 1-based and must cover 1..max
// without gaps. Throws IngestError on malformed entries.
std::map<std::string, std::uint32_t> parse_color_map(const std::vector<std::string>& pairs);

// Row-major numeric table with one color per row.
struct Dataset {
    std::vector<std::string> columns;
    std::size_t dims = 0;
    std::vector<double> features;
    std::vector<Color> colors;  // zero-based
    std::size_t num_colors = 0;
    // Index of each row among the data rows of the source file (header
    // excluded, counted before any row was dropped).
    std::vector<std::uint64_t> source_rows;
    std::size_t dropped_rows = 0;

    std::size_t size() const { return colors.size(); }
    const double* row(std::size_t i) const { return features.data() + i * dims; }
    // Fraction of rows per color.
    std::vector<double> color_fractions() const;
};

// Comma-separated, header row required, double quotes may wrap fields.
// Rows whose selected numeric fields are empty or non-numeric are dropped.
// The number of colors is the largest id in the color map. Throws IngestError
// for a missing file or column, an unmapped color value, or no usable rows.
Dataset load_csv(const IngestConfig& config);
Dataset read_csv(std::istream& in, const IngestConfig& config);

// Exactly n rows: per-color quota floor(n * fraction), remaining slots go to
// the largest remainders (ties: lower color id). Rows inside each color are
// drawn uniformly without replacement from a seeded mt19937_64; the result
// keeps source order. Throws InputError when n exceeds the dataset.
Dataset subsample(const Dataset& data, std::size_t n, std::uint64_t seed);

// Per-color quotas used by subsample().
std::vector<std::size_t> color_quotas(const Dataset& data, std::size_t n);

// Rescales every feature to [0, 1]; constant columns become 0.
void normalize_min_max(Dataset& data);

// w(i,j) = 1 / (1 + Euclidean distance).
SimilarityGraph build_similarity(const Dataset& data);

// Census-like table: age, fnlwgt, education-num, capital-gain, capital-loss,
// hours-per-week plus a `race` column holding "nonwhite" for exactly one row
// in eight and "white" otherwise. Written as CSV to `out`.
void write_synthetic_census(std::ostream& out, std::size_t rows, std::uint64_t seed);

// Column list and color map that read the synthetic table with nonwhite as
// color 1 (blue) and white as color 2 (red).
IngestConfig synthetic_census_config();

}  // namespace fairhc
