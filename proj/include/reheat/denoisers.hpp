#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "reheat/noise_process.hpp"
#include "reheat/rng.hpp"

namespace reheat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Maps (state, noise level) to a prediction of the clean sample.
using CleanFn = std::function<Vec(const Vec&, const NoiseLevel&)>;

/// Isotropic Gaussian mixture: component k is N(means[k], stds[k]^2 I).
struct GmmSpec {
    int dim = 2;
    std::vector<double> weights;
    std::vector<Vec> means;
    std::vector<double> stds;

    int components() const { return static_cast<int>(weights.size()); }
    void validate() const;

    /// K equal-weight components evenly spaced on a circle in the first two axes.
    static GmmSpec ring(int components = 8, double radius = 1.0, double std = 0.15, int dim = 2);
    static GmmSpec single(int dim, double std, const Vec& mean);

    /// Draw from the mixture with one counter stream per row.
    Mat sample(int n, std::uint64_t seed, Stream stream = Stream::Reference) const;
    Vec draw(CounterRng& rng) const;
};

/// E[x0 | signal * x0 + noise * eps = x] under the mixture prior.
Vec gmm_posterior_mean(const GmmSpec& gmm, const Vec& x, const NoiseLevel& level);

/// Draw x = signal * x0 + noise * eps with x0 from the mixture.
Vec sample_marginal(const GmmSpec& gmm, const NoiseLevel& level, CounterRng& rng);

Vec bayes_vp(const Vec& x, double alphabar, const GmmSpec& gmm);
Vec bayes_ve(const Vec& x, double sigma, const GmmSpec& gmm);
Vec bayes_fm_velocity(const Vec& x, double t, const GmmSpec& gmm);

/// Smooth seeded field R^d -> R^d: a sum of eight sinusoids of random
/// projections, scaled to unit RMS under a reference distribution.
class PerturbationField {
public:
    PerturbationField(int dim, std::uint64_t seed);

    Vec operator()(const Vec& x) const;
    void normalise(const GmmSpec& gmm, const NoiseLevel& level, int draws = 16384);
    double scale() const { return scale_; }

    static constexpr int kTerms = 8;
    static constexpr double kFrequency = 1.5;

private:
    Mat directions_;  // d x kTerms, wave vectors
    Mat amplitudes_;  // d x kTerms, unit output directions
    Vec phases_;
    std::uint64_t seed_;
    double scale_ = 1.0;
};

struct Perturbation {
    double eps_amp = 0.0;
    double center = 0.5;
    double width = 0.05;
    std::uint64_t field_seed = 0;
};

enum class DenoiserKind { BayesVp, BayesVe, BayesFmVelocity, Perturbed };

/// Bayes-optimal denoiser of a mixture, optionally with an injected error
/// eps_amp * exp(-(s - center)^2 / 2 width^2) * u(x) at unified level s.
class Denoiser {
public:
    static Denoiser bayes(Family family, GmmSpec gmm);

    DenoiserKind kind() const;
    Family family() const { return family_; }
    const GmmSpec& gmm() const { return *gmm_; }
    const std::optional<Perturbation>& perturbation() const { return perturbation_; }

    /// D_theta: the implemented clean-sample prediction.
    Vec clean(const Vec& x, const NoiseLevel& level) const;
    /// D*: the exact posterior mean.
    Vec bayes_clean(const Vec& x, const NoiseLevel& level) const;
    /// Flow-matching velocity (D_theta(x, t) - x) / (1 - t).
    Vec velocity(const Vec& x, double t) const;

    Vec operator()(const Vec& x, const NoiseLevel& level) const { return clean(x, level); }

    double error_envelope(double sigma_hat) const;

    friend Denoiser perturb(const Denoiser& base, double eps_amp, double center, double width,
                            std::uint64_t field_seed);

private:
    Family family_ = Family::Ddpm;
    std::shared_ptr<const GmmSpec> gmm_;
    std::optional<Perturbation> perturbation_;
    std::shared_ptr<const PerturbationField> field_;
};

Denoiser perturb(const Denoiser& base, double eps_amp, double center, double width, std::uint64_t field_seed);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// RMS gap between D_theta and D* over n draws of the marginal at sigma_hat.
Estimate estimate_eps(const Denoiser& denoiser, double sigma_hat, int n, std::uint64_t seed = 0);

/// Largest difference quotient over sampled pairs (x, x + radius v), |v| = 1,
/// with x from the mixture marginal. An empirical lower bound on L.
double estimate_lipschitz(const CleanFn& denoiser, Family family, const GmmSpec& gmm, double sigma_hat,
                          int n_pairs, double radius, std::uint64_t seed = 0);

}  // namespace reheat
