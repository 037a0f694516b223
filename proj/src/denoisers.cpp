#include "reheat/denoisers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "reheat/errors.hpp"

namespace reheat {

void GmmSpec::validate() const {
    require(dim >= 2 && dim <= 8, ErrorCode::Parameter, "mixture dimension must lie in [2, 8]");
    const auto K = weights.size();
    require(K >= 1, ErrorCode::Parameter, "mixture needs at least one component");
    require(means.size() == K && stds.size() == K, ErrorCode::Parameter,
            "mixture weights, means and stds must have equal length");
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        require(weights[k] >= 0.0, ErrorCode::Parameter, "mixture weights must be nonnegative");
        require(stds[k] > 0.0, ErrorCode::Parameter, "mixture stds must be positive");
        require(means[k].size() == dim, ErrorCode::DimensionMismatch, "mixture mean has wrong dimension");
        total += weights[k];
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::Parameter, "mixture weights must sum to 1");
}

GmmSpec GmmSpec::ring(int components, double radius, double std, int dim) {
    require(dim >= 2, ErrorCode::Parameter, "ring mixture needs dim >= 2");
    require(components >= 1, ErrorCode::Parameter, "ring mixture needs at least one component");
    GmmSpec g;
    g.dim = dim;
    for (int k = 0; k < components; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / components;
        Vec m = Vec::Zero(dim);
        m[0] = radius * std::cos(angle);
        m[1] = radius * std::sin(angle);
        g.means.push_back(m);
        g.stds.push_back(std);
        g.weights.push_back(1.0 / components);
    }
    g.validate();
    return g;
}

GmmSpec GmmSpec::single(int dim, double std, const Vec& mean) {
    GmmSpec g{dim, {1.0}, {mean}, {std}};
    g.validate();
    return g;
}

Vec GmmSpec::draw(CounterRng& rng) const {
    const double u = rng.uniform();
    int k = 0;
    double acc = weights[0];
    while (u > acc && k + 1 < components()) acc += weights[static_cast<std::size_t>(++k)];
    Vec x(dim);
    const auto kk = static_cast<std::size_t>(k);
    for (int j = 0; j < dim; ++j) x[j] = means[kk][j] + stds[kk] * rng.normal();
    return x;
}

Mat GmmSpec::sample(int n, std::uint64_t seed, Stream stream) const {
    Mat out(n, dim);
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, stream, static_cast<std::uint64_t>(i));
        out.row(i) = draw(rng).transpose();
    }
    return out;
}

Vec gmm_posterior_mean(const GmmSpec& gmm, const Vec& x, const NoiseLevel& level) {
    const int d = gmm.dim;
    const int K = gmm.components();
    require(x.size() == d, ErrorCode::DimensionMismatch, "state dimension does not match mixture");
    const double a = level.signal;
    const double b2 = level.noise * level.noise;

    thread_local std::vector<double> log_resp;
    log_resp.resize(static_cast<std::size_t>(K));
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double w = gmm.weights[kk];
        if (w <= 0.0) {
            log_resp[kk] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const double s2 = gmm.stds[kk] * gmm.stds[kk];
        const double var = a * a * s2 + b2;
        const double* m = gmm.means[kk].data();
        double sq = 0.0;
        for (int j = 0; j < d; ++j) {
            const double r = x[j] - a * m[j];
            sq += r * r;
        }
        log_resp[kk] = std::log(w) - 0.5 * d * std::log(var) - 0.5 * sq / var;
        top = std::max(top, log_resp[kk]);
    }

    Vec out = Vec::Zero(d);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double r = std::exp(log_resp[kk] - top);
        if (r == 0.0) continue;
        total += r;
        const double s2 = gmm.stds[kk] * gmm.stds[kk];
        const double gain = a * s2 / (a * a * s2 + b2);
        const double* m = gmm.means[kk].data();
        for (int j = 0; j < d; ++j) out[j] += r * (m[j] + gain * (x[j] - a * m[j]));
    }
    return out / total;
}

Vec sample_marginal(const GmmSpec& gmm, const NoiseLevel& level, CounterRng& rng) {
    Vec x0 = gmm.draw(rng);
    for (int j = 0; j < gmm.dim; ++j) x0[j] = level.signal * x0[j] + level.noise * rng.normal();
    return x0;
}

Vec bayes_vp(const Vec& x, double alphabar, const GmmSpec& gmm) {
    require(alphabar > 0.0 && alphabar <= 1.0, ErrorCode::Domain, "alphabar must lie in (0, 1]");
    return gmm_posterior_mean(gmm, x, {std::sqrt(alphabar), std::sqrt(1.0 - alphabar)});
}

Vec bayes_ve(const Vec& x, double sigma, const GmmSpec& gmm) {
    require(sigma >= 0.0, ErrorCode::Domain, "sigma must be nonnegative");
    return gmm_posterior_mean(gmm, x, {1.0, sigma});
}

Vec bayes_fm_velocity(const Vec& x, double t, const GmmSpec& gmm) {
    require(t > 0.0 && t < 1.0, ErrorCode::Domain, "flow time must lie strictly inside (0, 1)");
    return (gmm_posterior_mean(gmm, x, {t, 1.0 - t}) - x) / (1.0 - t);
}

PerturbationField::PerturbationField(int dim, std::uint64_t seed)
    : directions_(dim, kTerms), amplitudes_(dim, kTerms), phases_(kTerms), seed_(seed) {
    CounterRng rng(seed, Stream::Field, 0);
    auto unit = [&] {
        Vec v(dim);
        for (int j = 0; j < dim; ++j) v[j] = rng.normal();
        return Vec(v / v.norm());
    };
    for (int t = 0; t < kTerms; ++t) {
        directions_.col(t) = kFrequency * unit();
        amplitudes_.col(t) = unit();
        phases_[t] = 2.0 * std::numbers::pi * rng.uniform();
    }
}

Vec PerturbationField::operator()(const Vec& x) const {
    Vec out = Vec::Zero(x.size());
    for (int t = 0; t < kTerms; ++t) {
        out += std::sin(directions_.col(t).dot(x) + phases_[t]) * amplitudes_.col(t);
    }
    return scale_ * out;
}

void PerturbationField::normalise(const GmmSpec& gmm, const NoiseLevel& level, int draws) {
    scale_ = 1.0;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        CounterRng rng(seed_, Stream::Field, static_cast<std::uint64_t>(i) + 1);
        acc += (*this)(sample_marginal(gmm, level, rng)).squaredNorm();
    }
    scale_ = 1.0 / std::sqrt(acc / draws);
}

Denoiser Denoiser::bayes(Family family, GmmSpec gmm) {
    gmm.validate();
    Denoiser d;
    d.family_ = family;
    d.gmm_ = std::make_shared<const GmmSpec>(std::move(gmm));
    return d;
}

DenoiserKind Denoiser::kind() const {
    if (perturbation_) return DenoiserKind::Perturbed;
    switch (family_) {
        case Family::Ddpm: return DenoiserKind::BayesVp;
        case Family::Edm: return DenoiserKind::BayesVe;
        case Family::Fm: return DenoiserKind::BayesFmVelocity;
    }
    return DenoiserKind::BayesVp;
}

double Denoiser::error_envelope(double level) const {
    if (!perturbation_ || perturbation_->eps_amp == 0.0) return 0.0;
    const double z = (level - perturbation_->center) / perturbation_->width;
    return perturbation_->eps_amp * std::exp(-0.5 * z * z);
}

Vec Denoiser::bayes_clean(const Vec& x, const NoiseLevel& level) const {
    return gmm_posterior_mean(*gmm_, x, level);
}

Vec Denoiser::clean(const Vec& x, const NoiseLevel& level) const {
    Vec out = gmm_posterior_mean(*gmm_, x, level);
    const double envelope = error_envelope(level.sigma_hat());
    if (envelope != 0.0) out += envelope * (*field_)(x);
    return out;
}

Vec Denoiser::velocity(const Vec& x, double t) const {
    require(t > 0.0 && t < 1.0, ErrorCode::Domain, "flow time must lie strictly inside (0, 1)");
    return (clean(x, {t, 1.0 - t}) - x) / (1.0 - t);
}

Denoiser perturb(const Denoiser& base, double eps_amp, double center, double width, std::uint64_t field_seed) {
    require(eps_amp >= 0.0, ErrorCode::Parameter, "eps_amp must be nonnegative");
    require(width > 0.0, ErrorCode::Parameter, "perturbation width must be positive");
    require(center >= 0.0, ErrorCode::Parameter, "perturbation center must be a valid noise level");
    Denoiser d = base;
    d.perturbation_ = Perturbation{eps_amp, center, width, field_seed};
    auto field = std::make_shared<PerturbationField>(base.gmm().dim, field_seed);
    field->normalise(base.gmm(), noise_level_from_sigma_hat(base.family(), center));
    d.field_ = std::move(field);
    return d;
}

Estimate estimate_eps(const Denoiser& denoiser, double level, int n, std::uint64_t seed) {
    require(n >= 1000, ErrorCode::Parameter, "estimate_eps needs at least 1000 draws");
    const NoiseLevel nl = noise_level_from_sigma_hat(denoiser.family(), level);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, Stream::Probe, static_cast<std::uint64_t>(i));
        const Vec x = sample_marginal(denoiser.gmm(), nl, rng);
        const double gap = (denoiser.clean(x, nl) - denoiser.bayes_clean(x, nl)).squaredNorm();
        sum += gap;
        sum_sq += gap * gap;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
    const double rms = std::sqrt(mean);
    const double se_mean = std::sqrt(var / n);
    return {rms, rms > 0.0 ? se_mean / (2.0 * rms) : 0.0};
}

double estimate_lipschitz(const CleanFn& denoiser, Family family, const GmmSpec& gmm, double level, int n_pairs,
                          double radius, std::uint64_t seed) {
    require(n_pairs >= 1000, ErrorCode::Parameter, "estimate_lipschitz needs at least 1000 pairs");
    require(radius > 0.0, ErrorCode::Parameter, "pair radius must be positive");
    const NoiseLevel nl = noise_level_from_sigma_hat(family, level);
    double best = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        CounterRng rng(seed, Stream::Probe, static_cast<std::uint64_t>(i));
        const Vec x = sample_marginal(gmm, nl, rng);
        Vec v(gmm.dim);
        for (int j = 0; j < gmm.dim; ++j) v[j] = rng.normal();
        v /= v.norm();
        const double quotient = (denoiser(x + radius * v, nl) - denoiser(x, nl)).norm() / radius;
        best = std::max(best, quotient);
    }
    return best;
}

}  // namespace reheat
