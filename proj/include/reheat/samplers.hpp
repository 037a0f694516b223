#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reheat/denoisers.hpp"
#include "reheat/noise_process.hpp"
#include "reheat/rng.hpp"
#include "reheat/schedules.hpp"

namespace reheat {

using VelocityFn = std::function<Vec(const Vec&, double t)>;

enum class EdmIntegrator { Euler, Heun };

struct SamplerConfig {
    double eta = 0.0;
    std::optional<double> clip;  // symmetric bound on the clean prediction
    bool record_trajectory = false;
    std::uint64_t base_seed = 0;
    int workers = 1;
    EdmIntegrator integrator = EdmIntegrator::Euler;

    void validate() const;
};

struct StepRecord {
    int step = 0;
    double coordinate = 0.0;
    double sigma_hat = 0.0;
    bool is_reheat = false;
    double delta_ar = 0.0;
    Vec x0_hat;
};

struct SampleRun {
    Mat samples;  // one row per sample
    std::vector<std::vector<StepRecord>> trajectories;
    std::vector<int> nfe_used;
    std::vector<int> reheats_fired;

    int max_nfe() const;
    double mean_nfe() const;
    int total_reheats() const;
};

/// Trajectory CSV: step,coordinate,sigma_hat,is_reheat,delta_ar.
std::string trajectory_csv(const std::vector<StepRecord>& records);

struct DdimStep {
    Vec next;
    Vec x0_hat;
    Vec eps_tilde;
    double variance = 0.0;
};

/// sigma_i^2 of the generalised update; exactly zero unless alphabar rises.
double ddim_variance(double alphabar_from, double alphabar_to, double eta);

/// One generalised DDIM update between arbitrary alphabar values. `noise`
/// is required whenever the step variance is positive.
DdimStep ddim_step_alphabar(const Vec& x, double alphabar_from, double alphabar_to, const CleanFn& denoiser,
                            double eta, std::optional<double> clip, const Vec* noise = nullptr);

DdimStep ddim_step(const Vec& x, int tau_from, int tau_to, const AlphaBarBuffer& buffer, const CleanFn& denoiser,
                   double eta, std::optional<double> clip, const Vec* noise = nullptr);

Vec edm_euler_step(const Vec& x, double sigma_from, double sigma_to, const CleanFn& denoiser);

/// Trapezoidal correction of the Euler drift. Adds the evaluations it used to
/// `nfe`; one at the terminal sigma = 0 step, two otherwise.
Vec edm_heun_step(const Vec& x, double sigma_from, double sigma_to, const CleanFn& denoiser, int* nfe = nullptr);

Vec fm_euler_step(const Vec& x, double t_from, double t_to, const VelocityFn& velocity);

/// Velocity (D(x, t) - x) / (1 - t) of a clean-sample predictor.
VelocityFn velocity_from_clean(CleanFn denoiser);

/// Deterministic step between unified noise levels in any parameterisation.
Vec deterministic_step(Family family, const Vec& x, double sigma_hat_from, double sigma_hat_to,
                       const CleanFn& denoiser);

/// Prior draws for a schedule's first coordinate, one counter stream per row.
Mat initial_states(const Schedule& schedule, int dim, int n, std::uint64_t seed);

SampleRun run_sampler(const Schedule& schedule, const CleanFn& denoiser, const Mat& initial,
                      const SamplerConfig& config);
SampleRun run_sampler(const Schedule& schedule, const CleanFn& denoiser, int dim, int n,
                      const SamplerConfig& config);

SampleRun run_ddpm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config);
SampleRun run_edm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config);
SampleRun run_fm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config);

struct AdaptiveParams {
    double threshold = std::numeric_limits<double>::infinity();
    int delta_tau = 50;
    int max_reheats = 15;
};

/// Monotonic DDPM sampling that inserts one backward jump of delta_tau after
/// any step whose RMS change in the clean prediction exceeds the threshold.
SampleRun run_adaptive(const Schedule& base, const CleanFn& denoiser, const AdaptiveParams& params, int dim, int n,
                       const SamplerConfig& config);
SampleRun run_adaptive(const Schedule& base, const CleanFn& denoiser, const AdaptiveParams& params,
                       const Mat& initial, const SamplerConfig& config);

struct Calibration {
    double threshold = 0.0;
    long calibration_nfe = 0;
    int k_cal = 0;
    int nfe = 0;
    double percentile = 0.0;
    std::size_t values_collected = 0;
};

/// Initial states of the k_cal calibration trajectories.
Mat calibration_states(const Schedule& base, int dim, int k_cal, std::uint64_t seed);

/// Percentile of the RMS clean-prediction changes over k_cal monotonic runs.
Calibration calibrate_ar_threshold(const CleanFn& denoiser, const AlphaBarBuffer& buffer, int dim, int N, int k_cal,
                                   double percentile, std::uint64_t seed);

/// Linear-interpolation quantile, p in [0, 100].
double percentile_of(std::vector<double> values, double p);

struct NoiseSplit {
    Vec parallel;
    Vec orthogonal;
};

/// Components of z along and across the predicted noise direction.
NoiseSplit decompose_noise(const Vec& z, const Vec& eps_tilde);

enum class Counterfactual {
    /// The no-reheat path reaches the reheated level from the Bayes-optimal
    /// clean estimate, then takes the same return step.
    BayesReheat,
    /// The no-reheat path steps straight from the current to the next level.
    DirectStep,
};

/// Squared distance between reheat-then-denoise and the counterfactual path,
/// both deterministic.
double reheat_displacement(const Vec& x, double sigma_hat_i, double sigma_hat_reheat, double sigma_hat_next,
                           const Denoiser& denoiser, Family family,
                           Counterfactual counterfactual = Counterfactual::BayesReheat);

/// Runs fn(i) for i in [0, n) over contiguous chunks on `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace reheat
