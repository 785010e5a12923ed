#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bioace::nugget {

struct BgmmConfig {
    std::size_t max_components = 2;
    double tolerance = 1e-6;
    std::size_t max_iter = 500;
    std::uint64_t seed = 0;
    std::size_t min_samples = 4;
    /// Components whose expected weight falls below this are dropped from the report.
    double min_weight = 0.02;
    /// Uniform jitter amplitude added to the median-split initial responsibilities.
    double init_jitter = 0.05;
};

/// Variational posterior of one 1-D Gaussian component:
/// q(mu, lambda) = N(mu | m, 1 / (beta * lambda)) Gamma(lambda | a, b) (shape, rate),
/// q(pi) = Dirichlet(alpha).
struct BgmmComponent {
    double weight = 0.0;    ///< E[pi_k]
    double mean = 0.0;      ///< E[mu_k] = m
    double variance = 0.0;  ///< 1 / E[lambda_k] = b / a
    double alpha = 0.0;
    double beta = 0.0;
    double m = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct BgmmModel {
    std::vector<BgmmComponent> components;
    std::vector<double> elbo_trace;
    std::size_t similar_component = 0;
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t K() const { return components.size(); }
    bool degenerate() const { return components.size() < 2; }

    /// Recomputes weight/mean/variance from the variational parameters and
    /// picks similar_component as the component with the larger mean.
    void refresh_summary();
};

/// Coordinate-ascent variational inference for a Bayesian mixture of up to two
/// univariate Gaussians. Priors: Dirichlet(1/K), Normal mean centred on the
/// sample mean with unit mean precision, Gamma(shape 1, rate = sample variance).
/// Throws TooFewSamples below config.min_samples.
BgmmModel fit_bgmm(std::span<const double> samples, const BgmmConfig& config = {});

/// Posterior-predictive responsibilities at s (Student-t components), one per component.
std::vector<double> predictive_responsibilities(const BgmmModel& model, double s);

/// Probability that s came from the "similar" component. Throws DegenerateModel when K = 1.
double similar_probability(const BgmmModel& model, double s);

}  // namespace bioace::nugget
