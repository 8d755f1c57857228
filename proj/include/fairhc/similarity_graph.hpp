#pragma once

#include <cstddef>
#include <vector>

namespace fairhc {

// Complete weighted graph over n points stored as a dense symmetric matrix.
// The diagonal is unused and kept at zero.
class SimilarityGraph {
public:
    SimilarityGraph() = default;
    explicit SimilarityGraph(std::size_t n) : n_(n), w_(n * n, 0.0) {}

    std::size_t size() const { return n_; }

    double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }

    // Sets w(i,j) = w(j,i). Throws InputError on negative or non-finite
    // weights and on i == j.
    void set_weight(std::size_t i, std::size_t j, double w);

    const double* row(std::size_t i) const { return w_.data() + i * n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> w_;
};

}  // namespace fairhc
