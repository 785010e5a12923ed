#include "bioace/nugget/bgmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/special_functions/digamma.hpp>

#include "bioace/error.hpp"

namespace bioace::nugget {

namespace {

using boost::math::digamma;

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct Priors {
    double alpha0;
    double m0;
    double beta0;
    double a0;
    double b0;
};

struct Expectations {
    double ln_pi;
    double ln_lambda;
    double lambda;
};

// Responsibilities are stored row-major: r[n * K + k].
using Resp = std::vector<double>;

void m_step(std::span<const double> x, const Resp& r, std::size_t K, const Priors& p,
            std::vector<BgmmComponent>& comps) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < K; ++k) {
        double nk = 0.0, sx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nk += r[i * K + k];
            sx += r[i * K + k] * x[i];
        }
        const double xbar = nk > 0.0 ? sx / nk : p.m0;
        double scatter = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - xbar;
            scatter += r[i * K + k] * d * d;
        }
        auto& c = comps[k];
        c.alpha = p.alpha0 + nk;
        c.beta = p.beta0 + nk;
        c.m = (p.beta0 * p.m0 + nk * xbar) / c.beta;
        c.a = p.a0 + 0.5 * nk;
        const double dm = xbar - p.m0;
        c.b = p.b0 + 0.5 * (scatter + p.beta0 * nk / (p.beta0 + nk) * dm * dm);
    }
}

std::vector<Expectations> expectations(const std::vector<BgmmComponent>& comps) {
    double alpha_sum = 0.0;
    for (const auto& c : comps) alpha_sum += c.alpha;
    const double dg_sum = digamma(alpha_sum);
    std::vector<Expectations> e(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto& c = comps[k];
        e[k] = {digamma(c.alpha) - dg_sum, digamma(c.a) - std::log(c.b), c.a / c.b};
    }
    return e;
}

// E[lambda (x - mu)^2] under q(mu, lambda).
double expected_sq(const BgmmComponent& c, double x) {
    const double d = x - c.m;
    return 1.0 / c.beta + (c.a / c.b) * d * d;
}

void e_step(std::span<const double> x, const std::vector<BgmmComponent>& comps, Resp& r) {
    const std::size_t K = comps.size();
    const auto e = expectations(comps);
    std::vector<double> logits(K);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double mx = -INFINITY;
        for (std::size_t k = 0; k < K; ++k) {
            logits[k] = e[k].ln_pi + 0.5 * e[k].ln_lambda - 0.5 * kLog2Pi - 0.5 * expected_sq(comps[k], x[i]);
            mx = std::max(mx, logits[k]);
        }
        double z = 0.0;
        for (std::size_t k = 0; k < K; ++k) z += std::exp(logits[k] - mx);
        for (std::size_t k = 0; k < K; ++k) r[i * K + k] = std::exp(logits[k] - mx) / z;
    }
}

double ln_dirichlet_norm(const std::vector<double>& alpha) {
    double sum = 0.0, lg = 0.0;
    for (double a : alpha) {
        sum += a;
        lg += std::lgamma(a);
    }
    return std::lgamma(sum) - lg;
}

double elbo(std::span<const double> x, const Resp& r, const std::vector<BgmmComponent>& comps, const Priors& p) {
    const std::size_t K = comps.size();
    const auto e = expectations(comps);
    double total = 0.0;

    // E[ln p(x | z, mu, lambda)] + E[ln p(z | pi)] - E[ln q(z)]
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            const double rik = r[i * K + k];
            if (rik <= 0.0) continue;
            total += rik * (0.5 * e[k].ln_lambda - 0.5 * kLog2Pi - 0.5 * expected_sq(comps[k], x[i]));
            total += rik * e[k].ln_pi;
            total -= rik * std::log(rik);
        }
    }

    // E[ln p(pi)] - E[ln q(pi)]
    std::vector<double> prior_alpha(K, p.alpha0), post_alpha(K);
    for (std::size_t k = 0; k < K; ++k) post_alpha[k] = comps[k].alpha;
    total += ln_dirichlet_norm(prior_alpha) - ln_dirichlet_norm(post_alpha);
    for (std::size_t k = 0; k < K; ++k) total += (p.alpha0 - comps[k].alpha) * e[k].ln_pi;

    // E[ln p(mu, lambda)] - E[ln q(mu, lambda)]
    for (std::size_t k = 0; k < K; ++k) {
        const auto& c = comps[k];
        const double dm = c.m - p.m0;
        const double e_prior_sq = 1.0 / c.beta + (c.a / c.b) * dm * dm;
        total += 0.5 * std::log(p.beta0) - 0.5 * p.beta0 * e_prior_sq;
        total -= 0.5 * std::log(c.beta) - 0.5;
        total += p.a0 * std::log(p.b0) - std::lgamma(p.a0) + (p.a0 - 1.0) * e[k].ln_lambda - p.b0 * e[k].lambda;
        total -= c.a * std::log(c.b) - std::lgamma(c.a) + (c.a - 1.0) * e[k].ln_lambda - c.b * e[k].lambda;
    }
    return total;
}

double student_t_logpdf(double x, double nu, double loc, double precision) {
    const double d = x - loc;
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) + 0.5 * std::log(precision / (std::numbers::pi * nu)) -
           0.5 * (nu + 1.0) * std::log1p(precision * d * d / nu);
}

}  // namespace

void BgmmModel::refresh_summary() {
    double alpha_sum = 0.0;
    for (const auto& c : components) alpha_sum += c.alpha;
    for (auto& c : components) {
        c.weight = c.alpha / alpha_sum;
        c.mean = c.m;
        c.variance = c.b / c.a;
    }
    similar_component = 0;
    for (std::size_t k = 1; k < components.size(); ++k) {
        if (components[k].mean > components[similar_component].mean) similar_component = k;
    }
}

BgmmModel fit_bgmm(std::span<const double> x, const BgmmConfig& config) {
    const std::size_t min_samples = std::max<std::size_t>(config.min_samples, 1);
    if (x.size() < min_samples) {
        fail(ErrorKind::TooFewSamples, std::to_string(x.size()) + " samples, need at least " + std::to_string(min_samples));
    }
    for (double v : x) {
        if (!std::isfinite(v)) fail(ErrorKind::PreconditionFailed, "non-finite similarity sample");
    }
    const std::size_t n = x.size();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);

    const std::size_t K = std::max<std::size_t>(1, std::min<std::size_t>(config.max_components, 2));
    Priors priors{1.0 / static_cast<double>(K), mean, 1.0, 1.0, var};

    BgmmModel model;
    if (var <= 0.0 || K == 1) {
        // No second mode to find: one component absorbs every sample.
        priors.alpha0 = 1.0;
        priors.b0 = var > 0.0 ? var : 1e-12;
        Resp r(n, 1.0);
        model.components.resize(1);
        m_step(x, r, 1, priors, model.components);
        model.elbo_trace.push_back(elbo(x, r, model.components, priors));
        model.converged = true;
        model.refresh_summary();
        return model;
    }

    // Median split: below-median samples start in component 0, above in 1.
    std::vector<double> sorted(x.begin(), x.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double median = sorted[n / 2];
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> jitter(-config.init_jitter, config.init_jitter);
    Resp r(n * K);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = x[i] > median ? 0.9 : (x[i] < median ? 0.1 : 0.5);
        const double high = std::clamp(base + jitter(rng), 0.0, 1.0);
        r[i * K + 0] = 1.0 - high;
        r[i * K + 1] = high;
    }

    model.components.resize(K);
    double previous = -INFINITY;
    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        m_step(x, r, K, priors, model.components);
        const double value = elbo(x, r, model.components, priors);
        model.elbo_trace.push_back(value);
        model.iterations = iter + 1;
        if (std::abs(value - previous) < config.tolerance) {
            model.converged = true;
            break;
        }
        previous = value;
        e_step(x, model.components, r);
    }

    model.refresh_summary();
    const auto lightest = std::min_element(model.components.begin(), model.components.end(),
                                           [](const auto& a, const auto& b) { return a.weight < b.weight; });
    if (lightest->weight < config.min_weight) {
        model.components.erase(lightest);
        model.refresh_summary();
    }
    return model;
}

std::vector<double> predictive_responsibilities(const BgmmModel& model, double s) {
    const std::size_t K = model.K();
    std::vector<double> logp(K);
    double mx = -INFINITY;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& c = model.components[k];
        const double nu = 2.0 * c.a;
        const double precision = c.a * c.beta / ((1.0 + c.beta) * c.b);
        logp[k] = std::log(c.weight) + student_t_logpdf(s, nu, c.m, precision);
        mx = std::max(mx, logp[k]);
    }
    double z = 0.0;
    for (double lp : logp) z += std::exp(lp - mx);
    for (auto& lp : logp) lp = std::exp(lp - mx) / z;
    return logp;
}

double similar_probability(const BgmmModel& model, double s) {
    if (model.degenerate()) fail(ErrorKind::DegenerateModel, "mixture has a single component");
    return predictive_responsibilities(model, s)[model.similar_component];
}

}  // namespace bioace::nugget
