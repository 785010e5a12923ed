#pragma once

#include <cstddef>
#include <vector>

namespace bioace::kernels {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    Matrix(std::vector<std::vector<double>> grid);

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    bool empty() const { return rows == 0 || cols == 0; }

    std::vector<std::vector<double>> to_grid() const;
    bool operator==(const Matrix&) const = default;
};

}  // namespace bioace::kernels
