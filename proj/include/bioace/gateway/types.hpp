#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bioace::gateway {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

struct NliResult {
    double p_support = 0.0;
    double p_refute = 0.0;
    double p_insufficient = 0.0;
};

struct RerankCandidate {
    std::string pmid;
    std::string text;
};

struct RerankedDoc {
    std::string pmid;
    double score = 0.0;

    bool operator==(const RerankedDoc&) const = default;
};

}  // namespace bioace::gateway
