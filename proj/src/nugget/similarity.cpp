#include "bioace/nugget/similarity.hpp"

#include "bioace/error.hpp"

namespace bioace::nugget {

SimilarityMatrix similarity_from_embeddings(const std::vector<std::vector<double>>& sys,
                                            const std::vector<std::vector<double>>& gold, kernels::Backend backend) {
    if (sys.empty() || gold.empty()) fail(ErrorKind::EmptyInput, "similarity matrix needs nuggets on both sides");
    if (sys.front().size() != gold.front().size())
        fail(ErrorKind::DimensionMismatch, "system and gold embeddings differ in dimension");
    SimilarityMatrix m;
    m.values = kernels::cosine_matrix(sys, gold, backend);
    return m;
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& sys_nuggets,
                                         const std::vector<std::string>& gold_nuggets, gateway::ModelGateway& gateway,
                                         const gateway::EndpointConfig& embed_endpoint) {
    if (sys_nuggets.empty() || gold_nuggets.empty())
        fail(ErrorKind::EmptyInput, "similarity matrix needs nuggets on both sides");
    auto texts = sys_nuggets;
    texts.insert(texts.end(), gold_nuggets.begin(), gold_nuggets.end());
    const auto vectors = gateway.embed_batch(texts, embed_endpoint);
    std::vector<std::vector<double>> sys, gold;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        (i < sys_nuggets.size() ? sys : gold).push_back(vectors[i].values);
    }
    auto m = similarity_from_embeddings(sys, gold);
    m.row_nuggets = sys_nuggets;
    m.col_nuggets = gold_nuggets;
    return m;
}

}  // namespace bioace::nugget
