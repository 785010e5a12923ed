#include "bioace/kernels/kernels.hpp"

#include <atomic>
#include <cmath>

#include "bioace/error.hpp"

namespace bioace::kernels {

namespace {

std::atomic<Backend> g_backend{
#ifdef BIOACE_HAVE_OPENMP
    Backend::openmp
#else
    Backend::serial
#endif
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> norms_of(std::span<const std::vector<double>> vs, std::size_t dim) {
    std::vector<double> norms(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i].size() != dim) fail(ErrorKind::DimensionMismatch, "ragged embedding input");
        norms[i] = std::sqrt(dot(vs[i], vs[i]));
        if (!(norms[i] > 0.0)) fail(ErrorKind::ZeroVector, "embedding #" + std::to_string(i) + " has zero norm");
    }
    return norms;
}

}  // namespace

Matrix::Matrix(std::vector<std::vector<double>> grid) : rows(grid.size()), cols(grid.empty() ? 0 : grid[0].size()) {
    data.reserve(rows * cols);
    for (const auto& row : grid) {
        if (row.size() != cols) fail(ErrorKind::DimensionMismatch, "ragged matrix rows");
        data.insert(data.end(), row.begin(), row.end());
    }
}

std::vector<std::vector<double>> Matrix::to_grid() const {
    std::vector<std::vector<double>> grid(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) grid[i][j] = (*this)(i, j);
    return grid;
}

Backend default_backend() { return g_backend.load(); }
void set_default_backend(Backend backend) { g_backend.store(backend); }

bool openmp_available() {
#ifdef BIOACE_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef BIOACE_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "cosine of vectors with different dims");
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorKind::ZeroVector, "cosine of a zero vector");
    return dot(a, b) / (na * nb);
}

Matrix cosine_matrix(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b,
                     Backend backend) {
    Matrix out(a.size(), b.size());
    if (a.empty() || b.empty()) return out;
    const std::size_t dim = a.front().size();
    const auto na = norms_of(a, dim);
    const auto nb = norms_of(b, dim);
    const auto cells = static_cast<long long>(a.size() * b.size());
    const std::size_t cols = b.size();
    auto cell = [&](long long c) {
        const auto i = static_cast<std::size_t>(c) / cols;
        const auto j = static_cast<std::size_t>(c) % cols;
        out.data[static_cast<std::size_t>(c)] = dot(a[i], b[j]) / (na[i] * nb[j]);
    };
    if (backend == Backend::openmp) {
#ifdef BIOACE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < cells; ++c) cell(c);
        return out;
#endif
    }
    for (long long c = 0; c < cells; ++c) cell(c);
    return out;
}

void accumulate_postings(std::span<const WeightedPostings> terms, std::span<double> scores, Backend backend) {
    for (const auto& t : terms) {
        const auto& docs = *t.docs;
        const auto& contrib = *t.contributions;
        const auto n = static_cast<long long>(docs.size());
        if (backend == Backend::openmp) {
#ifdef BIOACE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
            for (long long p = 0; p < n; ++p) scores[docs[p]] += contrib[p];
            continue;
#endif
        }
        for (long long p = 0; p < n; ++p) scores[docs[p]] += contrib[p];
    }
}

}  // namespace bioace::kernels
