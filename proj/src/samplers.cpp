#include "reheat/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "reheat/errors.hpp"

namespace reheat {

void SamplerConfig::validate() const {
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::Parameter, "eta must lie in [0, 1]");
    require(!clip || *clip > 0.0, ErrorCode::Parameter, "clip bound must be positive");
    require(workers >= 1, ErrorCode::Parameter, "workers must be at least 1");
}

int SampleRun::max_nfe() const {
    return nfe_used.empty() ? 0 : *std::max_element(nfe_used.begin(), nfe_used.end());
}

double SampleRun::mean_nfe() const {
    if (nfe_used.empty()) return 0.0;
    return std::accumulate(nfe_used.begin(), nfe_used.end(), 0.0) / static_cast<double>(nfe_used.size());
}

int SampleRun::total_reheats() const { return std::accumulate(reheats_fired.begin(), reheats_fired.end(), 0); }

std::string trajectory_csv(const std::vector<StepRecord>& records) {
    std::string out = "step,coordinate,sigma_hat,is_reheat,delta_ar\n";
    char line[160];
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%d,%.17g\n", r.step, r.coordinate, r.sigma_hat,
                      r.is_reheat ? 1 : 0, r.delta_ar);
        out += line;
    }
    return out;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    const int threads = std::max(1, std::min(workers, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int begin = static_cast<int>(static_cast<long>(n) * t / threads);
        const int end = static_cast<int>(static_cast<long>(n) * (t + 1) / threads);
        pool.emplace_back([&, begin, end] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double ddim_variance(double alphabar_from, double alphabar_to, double eta) {
    if (!(alphabar_to > alphabar_from)) return 0.0;
    return eta * eta * ((1.0 - alphabar_to) / (1.0 - alphabar_from)) * (1.0 - alphabar_from / alphabar_to);
}

namespace {

Vec clipped(Vec v, std::optional<double> clip) {
    if (clip) v = v.cwiseMax(-*clip).cwiseMin(*clip);
    return v;
}

DdimStep ddim_from_prediction(const Vec& x, double ab_from, double ab_to, Vec x0_hat, double eta,
                              const Vec* noise) {
    DdimStep out;
    out.x0_hat = std::move(x0_hat);
    out.eps_tilde = (x - std::sqrt(ab_from) * out.x0_hat) / std::sqrt(1.0 - ab_from);
    out.variance = ddim_variance(ab_from, ab_to, eta);
    double keep = 1.0 - ab_to - out.variance;
    if (keep < 0.0 && keep > -1e-14) keep = 0.0;
    require(keep >= 0.0, ErrorCode::Numerical, "negative direction variance in DDIM update");
    out.next = std::sqrt(ab_to) * out.x0_hat + std::sqrt(keep) * out.eps_tilde;
    if (out.variance > 0.0) {
        require(noise != nullptr, ErrorCode::Parameter, "stochastic DDIM step needs a noise draw");
        out.next += std::sqrt(out.variance) * (*noise);
    }
    return out;
}

double rms(const Vec& v) { return v.size() ? std::sqrt(v.squaredNorm() / static_cast<double>(v.size())) : 0.0; }

Vec normal_vector(CounterRng& rng, int dim) {
    Vec z(dim);
    for (int j = 0; j < dim; ++j) z[j] = rng.normal();
    return z;
}

void check_finite(const Vec& x, int step, int sample) {
    if (!x.allFinite()) {
        fail(ErrorCode::Numerical, "non-finite state after step " + std::to_string(step) + " of sample " +
                                       std::to_string(sample));
    }
}

Mat initial_states_stream(const Schedule& schedule, int dim, int n, std::uint64_t seed, Stream stream) {
    const double scale = schedule.family == Family::Edm ? schedule.values.front() : 1.0;
    Mat out(n, dim);
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, stream, static_cast<std::uint64_t>(i));
        for (int j = 0; j < dim; ++j) out(i, j) = scale * rng.normal();
    }
    return out;
}

// Per-sample generator for in-run noise. Disjoint from the initial draw.
CounterRng step_rng(std::uint64_t seed, int sample) {
    return CounterRng(seed ^ 0x5deece66dULL, Stream::Sampler, static_cast<std::uint64_t>(sample));
}

struct Tracker {
    bool record = false;
    std::vector<StepRecord>* out = nullptr;
    Vec previous;
    bool has_previous = false;

    double observe(const Vec& x0_hat) {
        const double delta = has_previous ? rms(x0_hat - previous) : 0.0;
        previous = x0_hat;
        has_previous = true;
        return delta;
    }
};

}  // namespace

DdimStep ddim_step_alphabar(const Vec& x, double alphabar_from, double alphabar_to, const CleanFn& denoiser,
                            double eta, std::optional<double> clip, const Vec* noise) {
    require(alphabar_from > 0.0 && alphabar_from < 1.0, ErrorCode::Domain, "current alphabar must lie in (0, 1)");
    require(alphabar_to > 0.0 && alphabar_to <= 1.0, ErrorCode::Domain, "next alphabar must lie in (0, 1]");
    const NoiseLevel level{std::sqrt(alphabar_from), std::sqrt(1.0 - alphabar_from)};
    return ddim_from_prediction(x, alphabar_from, alphabar_to, clipped(denoiser(x, level), clip), eta, noise);
}

DdimStep ddim_step(const Vec& x, int tau_from, int tau_to, const AlphaBarBuffer& buffer, const CleanFn& denoiser,
                   double eta, std::optional<double> clip, const Vec* noise) {
    return ddim_step_alphabar(x, buffer.at(tau_from), buffer.at(tau_to), denoiser, eta, clip, noise);
}

Vec edm_euler_step(const Vec& x, double sigma_from, double sigma_to, const CleanFn& denoiser) {
    require(sigma_from > 0.0, ErrorCode::Domain, "EDM step needs sigma_i > 0");
    const Vec drift = (x - denoiser(x, {1.0, sigma_from})) / sigma_from;
    return x + (sigma_to - sigma_from) * drift;
}

Vec edm_heun_step(const Vec& x, double sigma_from, double sigma_to, const CleanFn& denoiser, int* nfe) {
    require(sigma_from > 0.0, ErrorCode::Domain, "EDM step needs sigma_i > 0");
    require(sigma_to <= sigma_from, ErrorCode::Unsupported, "Heun correction is defined for monotonic steps only");
    const Vec drift = (x - denoiser(x, {1.0, sigma_from})) / sigma_from;
    if (nfe) *nfe += 1;
    const double h = sigma_to - sigma_from;
    const Vec euler = x + h * drift;
    if (sigma_to == 0.0) return euler;
    const Vec drift_end = (euler - denoiser(euler, {1.0, sigma_to})) / sigma_to;
    if (nfe) *nfe += 1;
    return x + 0.5 * h * (drift + drift_end);
}

Vec fm_euler_step(const Vec& x, double t_from, double t_to, const VelocityFn& velocity) {
    require(t_from > 0.0 && t_from < 1.0, ErrorCode::Domain, "flow step needs t_i in (0, 1)");
    return x + (t_to - t_from) * velocity(x, t_from);
}

VelocityFn velocity_from_clean(CleanFn denoiser) {
    return [fn = std::move(denoiser)](const Vec& x, double t) -> Vec {
        return (fn(x, {t, 1.0 - t}) - x) / (1.0 - t);
    };
}

Vec deterministic_step(Family family, const Vec& x, double from, double to, const CleanFn& denoiser) {
    switch (family) {
        case Family::Ddpm:
            require(from > 0.0 && from < 1.0 && to >= 0.0 && to < 1.0, ErrorCode::Domain,
                    "DDPM unified levels must lie in [0, 1)");
            return ddim_step_alphabar(x, 1.0 - from * from, 1.0 - to * to, denoiser, 0.0, std::nullopt).next;
        case Family::Edm: return edm_euler_step(x, from, to, denoiser);
        case Family::Fm: return fm_euler_step(x, 1.0 - from, 1.0 - to, velocity_from_clean(denoiser));
    }
    fail(ErrorCode::Parameter, "unknown family");
}

Mat initial_states(const Schedule& schedule, int dim, int n, std::uint64_t seed) {
    return initial_states_stream(schedule, dim, n, seed, Stream::Sampler);
}

SampleRun run_sampler(const Schedule& schedule, const CleanFn& denoiser, const Mat& initial,
                      const SamplerConfig& config) {
    config.validate();
    validate(schedule);
    require(schedule.kind != ScheduleKind::Adaptive, ErrorCode::Unsupported, "use run_adaptive for adaptive sampling");

    const int N = schedule.nfe();
    const int n = static_cast<int>(initial.rows());
    const int dim = static_cast<int>(initial.cols());
    const auto level = schedule.sigma_hats();
    std::vector<char> reheat(static_cast<std::size_t>(N + 1), 0);
    for (int i : reheat_indices(schedule)) reheat[static_cast<std::size_t>(i)] = 1;

    if (schedule.family == Family::Edm && config.integrator == EdmIntegrator::Heun) {
        require(reheat_indices(schedule).empty(), ErrorCode::Unsupported,
                "Heun integration is only defined for monotonic schedules");
    }

    SampleRun run;
    run.samples.resize(n, dim);
    run.nfe_used.assign(static_cast<std::size_t>(n), 0);
    run.reheats_fired.assign(static_cast<std::size_t>(n), 0);
    if (config.record_trajectory) run.trajectories.resize(static_cast<std::size_t>(n));

    const auto* buffer = std::get_if<AlphaBarBuffer>(&schedule.process);
    const VelocityFn velocity = schedule.family == Family::Fm ? velocity_from_clean(denoiser) : VelocityFn{};

    parallel_for(n, config.workers, [&](int s) {
        Vec x = initial.row(s).transpose();
        CounterRng rng = step_rng(config.base_seed, s);
        Tracker tracker;
        auto* records = config.record_trajectory ? &run.trajectories[static_cast<std::size_t>(s)] : nullptr;
        int nfe = 0;

        for (int i = 0; i < N; ++i) {
            const double from = schedule.values[static_cast<std::size_t>(i)];
            const double to = schedule.values[static_cast<std::size_t>(i) + 1];
            Vec x0_hat;
            switch (schedule.family) {
                case Family::Ddpm: {
                    const double ab_from = buffer->at(static_cast<int>(from));
                    const double ab_to = buffer->at(static_cast<int>(to));
                    x0_hat = clipped(denoiser(x, {std::sqrt(ab_from), std::sqrt(1.0 - ab_from)}), config.clip);
                    ++nfe;
                    Vec z;
                    const bool stochastic = ddim_variance(ab_from, ab_to, config.eta) > 0.0;
                    if (stochastic) z = normal_vector(rng, dim);
                    x = ddim_from_prediction(x, ab_from, ab_to, x0_hat, config.eta, stochastic ? &z : nullptr).next;
                    break;
                }
                case Family::Edm: {
                    if (records) x0_hat = denoiser(x, {1.0, from});
                    if (config.integrator == EdmIntegrator::Heun) {
                        x = edm_heun_step(x, from, to, denoiser, &nfe);
                    } else {
                        x = edm_euler_step(x, from, to, denoiser);
                        ++nfe;
                    }
                    break;
                }
                case Family::Fm: {
                    if (records) x0_hat = denoiser(x, {from, 1.0 - from});
                    x = fm_euler_step(x, from, to, velocity);
                    ++nfe;
                    break;
                }
            }
            check_finite(x, i, s);
            if (records) {
                const double delta = tracker.observe(x0_hat);
                records->push_back({i, from, level[static_cast<std::size_t>(i)],
                                    reheat[static_cast<std::size_t>(i)] != 0, delta, x0_hat});
            }
        }
        run.samples.row(s) = x.transpose();
        run.nfe_used[static_cast<std::size_t>(s)] = nfe;
    });
    return run;
}

SampleRun run_sampler(const Schedule& schedule, const CleanFn& denoiser, int dim, int n,
                      const SamplerConfig& config) {
    return run_sampler(schedule, denoiser, initial_states(schedule, dim, n, config.base_seed), config);
}

SampleRun run_ddpm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config) {
    require(schedule.family == Family::Ddpm, ErrorCode::Parameter, "run_ddpm needs a DDPM schedule");
    return run_sampler(schedule, denoiser, dim, n, config);
}

SampleRun run_edm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config) {
    require(schedule.family == Family::Edm, ErrorCode::Parameter, "run_edm needs an EDM schedule");
    return run_sampler(schedule, denoiser, dim, n, config);
}

SampleRun run_fm(const Schedule& schedule, const CleanFn& denoiser, int dim, int n, const SamplerConfig& config) {
    require(schedule.family == Family::Fm, ErrorCode::Parameter, "run_fm needs an FM schedule");
    return run_sampler(schedule, denoiser, dim, n, config);
}

SampleRun run_adaptive(const Schedule& base, const CleanFn& denoiser, const AdaptiveParams& params, int dim, int n,
                       const SamplerConfig& config) {
    return run_adaptive(base, denoiser, params, initial_states(base, dim, n, config.base_seed), config);
}

SampleRun run_adaptive(const Schedule& base, const CleanFn& denoiser, const AdaptiveParams& params,
                       const Mat& initial, const SamplerConfig& config) {
    config.validate();
    require(base.family == Family::Ddpm, ErrorCode::Unsupported, "adaptive reheating is defined for DDPM");
    require(base.kind == ScheduleKind::Monotonic, ErrorCode::Parameter, "adaptive base schedule must be monotonic");
    require(params.delta_tau >= 1, ErrorCode::Parameter, "adaptive jump must be at least one timestep");
    require(params.max_reheats >= 0, ErrorCode::Parameter, "max_reheats must be nonnegative");

    const auto& buffer = std::get<AlphaBarBuffer>(base.process);
    const int N = base.nfe();
    const int last = buffer.T - 1;
    const int n = static_cast<int>(initial.rows());
    const int dim = static_cast<int>(initial.cols());

    SampleRun run;
    run.samples.resize(n, dim);
    run.nfe_used.assign(static_cast<std::size_t>(n), 0);
    run.reheats_fired.assign(static_cast<std::size_t>(n), 0);
    if (config.record_trajectory) run.trajectories.resize(static_cast<std::size_t>(n));

    parallel_for(n, config.workers, [&](int s) {
        Vec x = initial.row(s).transpose();
        CounterRng rng = step_rng(config.base_seed, s);
        Tracker tracker;
        auto* records = config.record_trajectory ? &run.trajectories[static_cast<std::size_t>(s)] : nullptr;
        int anchor = 0;
        int tau = base.timestep(0);
        int fired = 0;
        int nfe = 0;

        while (anchor < N) {
            const double ab_from = buffer.at(tau);
            Vec x0_hat = clipped(denoiser(x, {std::sqrt(ab_from), std::sqrt(1.0 - ab_from)}), config.clip);
            ++nfe;
            const bool first = !tracker.has_previous;
            const double delta = tracker.observe(x0_hat);
            const bool trigger = !first && delta > params.threshold && fired < params.max_reheats;
            const int next = trigger ? std::min(tau + params.delta_tau, last) : base.timestep(anchor + 1);

            const double ab_to = buffer.at(next);
            Vec z;
            const bool stochastic = ddim_variance(ab_from, ab_to, config.eta) > 0.0;
            if (stochastic) z = normal_vector(rng, dim);
            if (records) {
                records->push_back({nfe - 1, static_cast<double>(tau), std::sqrt(1.0 - ab_from), next > tau, delta,
                                    x0_hat});
            }
            x = ddim_from_prediction(x, ab_from, ab_to, std::move(x0_hat), config.eta, stochastic ? &z : nullptr).next;
            check_finite(x, nfe - 1, s);

            if (trigger) {
                ++fired;
            } else {
                ++anchor;
            }
            tau = next;
        }
        run.samples.row(s) = x.transpose();
        run.nfe_used[static_cast<std::size_t>(s)] = nfe;
        run.reheats_fired[static_cast<std::size_t>(s)] = fired;
    });
    return run;
}

Mat calibration_states(const Schedule& base, int dim, int k_cal, std::uint64_t seed) {
    return initial_states_stream(base, dim, k_cal, seed, Stream::Calibration);
}

double percentile_of(std::vector<double> values, double p) {
    require(!values.empty(), ErrorCode::InsufficientData, "percentile of an empty set");
    require(p >= 0.0 && p <= 100.0, ErrorCode::Parameter, "percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Calibration calibrate_ar_threshold(const CleanFn& denoiser, const AlphaBarBuffer& buffer, int dim, int N, int k_cal,
                                   double percentile, std::uint64_t seed) {
    require(k_cal >= 1, ErrorCode::Parameter, "k_cal must be at least 1");
    require(percentile > 0.0 && percentile <= 100.0, ErrorCode::Parameter, "percentile must lie in (0, 100]");
    const Schedule base = base_monotonic(buffer, N);
    SamplerConfig config;
    config.record_trajectory = true;
    config.base_seed = seed;
    const Mat initial = calibration_states(base, dim, k_cal, seed);
    const SampleRun run = run_sampler(base, denoiser, initial, config);

    std::vector<double> deltas;
    deltas.reserve(static_cast<std::size_t>(k_cal) * static_cast<std::size_t>(N - 1));
    for (const auto& trajectory : run.trajectories) {
        for (std::size_t i = 1; i < trajectory.size(); ++i) deltas.push_back(trajectory[i].delta_ar);
    }
    Calibration out;
    out.threshold = percentile_of(deltas, percentile);
    out.calibration_nfe = static_cast<long>(k_cal) * N;
    out.k_cal = k_cal;
    out.nfe = N;
    out.percentile = percentile;
    out.values_collected = deltas.size();
    return out;
}

NoiseSplit decompose_noise(const Vec& z, const Vec& eps_tilde) {
    require(z.size() == eps_tilde.size(), ErrorCode::DimensionMismatch, "noise vectors differ in dimension");
    const double norm = eps_tilde.norm();
    require(norm > 0.0, ErrorCode::Domain, "predicted noise direction is zero");
    const Vec unit = eps_tilde / norm;
    NoiseSplit out;
    out.parallel = z.dot(unit) * unit;
    out.orthogonal = z - out.parallel;
    return out;
}

double reheat_displacement(const Vec& x, double sigma_hat_i, double sigma_hat_reheat, double sigma_hat_next,
                           const Denoiser& denoiser, Family family, Counterfactual counterfactual) {
    require(sigma_hat_reheat > sigma_hat_i && sigma_hat_i >= sigma_hat_next, ErrorCode::Parameter,
            "reheat displacement needs sigma' > sigma_i >= sigma_{i+1}");
    const CleanFn trained = [&](const Vec& v, const NoiseLevel& l) { return denoiser.clean(v, l); };

    const Vec reheated = deterministic_step(family, x, sigma_hat_i, sigma_hat_reheat, trained);
    const Vec with_reheat = deterministic_step(family, reheated, sigma_hat_reheat, sigma_hat_next, trained);

    Vec without;
    if (counterfactual == Counterfactual::DirectStep) {
        without = deterministic_step(family, x, sigma_hat_i, sigma_hat_next, trained);
    } else {
        const CleanFn exact = [&](const Vec& v, const NoiseLevel& l) { return denoiser.bayes_clean(v, l); };
        const Vec on_distribution = deterministic_step(family, x, sigma_hat_i, sigma_hat_reheat, exact);
        without = deterministic_step(family, on_distribution, sigma_hat_reheat, sigma_hat_next, trained);
    }
    return (with_reheat - without).squaredNorm();
}

}  // namespace reheat
