#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "specbudget/errors.hpp"
#include "specbudget/rng.hpp"

namespace specbudget {

// Row-major to match the on-disk layout; one token per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A dense feature matrix: n_v token rows by d_v feature columns.
// Construction enforces non-empty dimensions and finite entries, so every
// downstream operation can rely on both.
class FeatureMatrix {
public:
    explicit FeatureMatrix(Matrix data) : data_(std::move(data)) {
        if (data_.rows() < 1 || data_.cols() < 1)
            throw BadDims("feature matrix must be at least 1x1, got " +
                          std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
        if (!data_.allFinite())
            throw NonFinite("feature matrix contains NaN or Inf");
    }

    Eigen::Index rows() const noexcept { return data_.rows(); }
    Eigen::Index cols() const noexcept { return data_.cols(); }
    const Matrix& data() const noexcept { return data_; }

    // Seeded i.i.d. standard-normal matrix; handy for tests and benchmarks.
    static FeatureMatrix standard_normal(Eigen::Index rows, Eigen::Index cols,
                                         std::uint64_t seed) {
        if (rows < 1 || cols < 1)
            throw BadDims("standard_normal requires positive dimensions");
        Matrix m(rows, cols);
        rng::fill_standard_normal(m.data(), static_cast<std::uint64_t>(m.size()), seed);
        return FeatureMatrix(std::move(m));
    }

private:
    Matrix data_;
};

} // namespace specbudget
