#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace latentflow {

// Dense row-major matrix of doubles. Snapshot stacks, predictions and latent
// trajectories are all small enough (~500 x 64) that a flat vector is fine.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    Matrix(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != static_cast<size_t>(r) * c)
            throw std::invalid_argument("Matrix: " + std::to_string(data.size()) +
                                        " values for a " + std::to_string(r) + "x" +
                                        std::to_string(c) + " shape");
    }

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }

    size_t size() const { return data.size(); }
};

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("Matrix subtraction: shape mismatch (" +
                                    std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                                    std::to_string(b.rows) + "x" + std::to_string(b.cols) + ")");
    Matrix out(a.rows, a.cols);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

}  // namespace latentflow
