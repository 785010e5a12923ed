#pragma once

#include <string>
#include <vector>

#include "bioace/gateway/gateway.hpp"
#include "bioace/kernels/kernels.hpp"

namespace bioace::nugget {

/// values(i, j) = cosine(embed(row_nuggets[i]), embed(col_nuggets[j])).
struct SimilarityMatrix {
    kernels::Matrix values;
    std::vector<std::string> row_nuggets;  ///< system nuggets
    std::vector<std::string> col_nuggets;  ///< gold nuggets

    std::size_t n_sys() const { return values.rows; }
    std::size_t n_gold() const { return values.cols; }
    std::vector<double> flattened() const { return values.data; }
};

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& sys_nuggets,
                                         const std::vector<std::string>& gold_nuggets, gateway::ModelGateway& gateway,
                                         const gateway::EndpointConfig& embed_endpoint);

/// Matrix from precomputed embeddings.
SimilarityMatrix similarity_from_embeddings(const std::vector<std::vector<double>>& sys,
                                            const std::vector<std::vector<double>>& gold,
                                            kernels::Backend backend = kernels::default_backend());

}  // namespace bioace::nugget
