#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bioace/kernels/matrix.hpp"

#ifdef BIOACE_HAVE_OPENMP
#include <omp.h>
#endif

namespace bioace::kernels {

/// Every kernel has a serial reference and an OpenMP variant that must agree
/// bit for bit: each output element is computed by the same sequence of
/// floating-point operations in both.
enum class Backend { serial, openmp };

Backend default_backend();
void set_default_backend(Backend backend);
bool openmp_available();
int max_threads();

/// Cosine similarity of every (row of a, row of b). Throws ZeroVector if any
/// input vector has zero norm and DimensionMismatch on ragged input.
Matrix cosine_matrix(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b,
                     Backend backend = default_backend());

double cosine(std::span<const double> a, std::span<const double> b);

/// out[i] = fn(i) for i in [0, n).
template <typename T, typename Fn>
std::vector<T> evaluate_grid(std::size_t n, Fn&& fn, Backend backend = default_backend()) {
    std::vector<T> out(n);
    if (backend == Backend::openmp) {
#ifdef BIOACE_HAVE_OPENMP
        const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        return out;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

/// Applies fn to every element of m.
template <typename Fn>
Matrix map_matrix(const Matrix& m, Fn&& fn, Backend backend = default_backend()) {
    Matrix out(m.rows, m.cols);
    const auto count = static_cast<long long>(m.data.size());
    if (backend == Backend::openmp) {
#ifdef BIOACE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < count; ++i) out.data[i] = fn(m.data[i]);
        return out;
#endif
    }
    for (long long i = 0; i < count; ++i) out.data[i] = fn(m.data[i]);
    return out;
}

struct WeightedPostings {
    const std::vector<std::size_t>* docs = nullptr;
    const std::vector<double>* contributions = nullptr;
};

/// Term-at-a-time accumulation: scores[doc] += contribution, one term after
/// another in the given order. Within one term a document appears at most once.
void accumulate_postings(std::span<const WeightedPostings> terms, std::span<double> scores,
                         Backend backend = default_backend());

}  // namespace bioace::kernels
