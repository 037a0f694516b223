#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reheat/denoisers.hpp"
#include "reheat/metrics.hpp"
#include "reheat/samplers.hpp"
#include "reheat/schedules.hpp"

namespace reheat {

inline constexpr int kSchemaVersion = 1;

struct ModelConfig {
    std::string shape = "ring";  // ring | single
    int components = 8;
    double radius = 1.0;
    double std = 0.15;
    int dim = 2;
    std::string denoiser = "bayes";  // bayes | perturbed
    Perturbation perturbation;

    GmmSpec gmm() const;
    Denoiser build(Family family) const;
};

struct ExperimentConfig {
    Family family = Family::Ddpm;
    AlphaBarBuffer alphabar = build_linear_alphabar();
    EdmRange edm;
    FlowRange flow;

    ScheduleKind kind = ScheduleKind::Monotonic;
    int nfe = 100;
    SingleReheatParams single_reheat;
    SawtoothParams sawtooth;
    DampedOscParams damped_osc;
    AdaptiveParams adaptive;
    double percentile = 80.0;
    int k_cal = 100;
    std::optional<double> threshold;  // adaptive; calibrated when absent

    ModelConfig model;

    double eta = 0.0;
    std::optional<double> clip;
    EdmIntegrator integrator = EdmIntegrator::Euler;

    std::vector<int> nfe_list{10, 25, 50, 100};
    int n_samples = 16384;
    int n_reference = 16384;
    std::uint64_t seed = 0;
    int floor_runs = 10;
    int ablation_nfe = 50;
    std::vector<double> positions{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<double> deltas{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    bool pareto_adaptive = false;

    Process process() const;
    Schedule schedule(int N) const;
    Schedule schedule(ScheduleKind kind, int N) const;
    void validate() const;
};

/// Strict INI parsing: unknown sections or keys are config errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Everything shared by one experiment: the denoiser and a reference fit.
class Lab {
public:
    Lab(ExperimentConfig config, int workers);

    const ExperimentConfig& config() const { return config_; }
    const Denoiser& denoiser() const { return denoiser_; }
    CleanFn clean_fn() const;

    SamplerConfig sampler(std::uint64_t seed, double eta) const;
    SampleRun sample(const Schedule& schedule, std::uint64_t seed, double eta) const;
    double fd(const Mat& samples) const;
    double fd(const Schedule& schedule, std::uint64_t seed, double eta) const;
    /// Sample standard deviation of FD over reseeded monotonic runs, each
    /// against its own reseeded reference set.
    double noise_floor(int N) const;
    /// FD of an exact mixture sample of the candidate size; the finite-sample
    /// bias any sampler inherits.
    double exact_baseline() const;

private:
    ExperimentConfig config_;
    int workers_;
    Denoiser denoiser_;
    GaussianFit reference_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

struct RunReport {
    std::string kind;
    int nfe = 0;
    double fd = 0.0;
    double fd_monotonic = 0.0;
    double penalty = 0.0;
    double noise_floor = 0.0;
    double exact_baseline = 0.0;
    double overhead = 0.0;
    int reheat_steps = 0;
    int max_nfe_used = 0;
    double mean_nfe_used = 0.0;
    int reheats_fired = 0;
    std::optional<Calibration> calibration;
};

struct AblationCell {
    double position = 0.0;
    double delta = 0.0;
    double fd = 0.0;
    double penalty = 0.0;
    int reheat_steps = 0;
};

struct AblationSummary {
    double delta = 0.0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    int improving = 0;  // cells beating the control by more than the floor
};

struct AblationRow {
    double position = 0.0;
    LinearFit fit;
};

struct AblationReport {
    int nfe = 0;
    double fd_monotonic = 0.0;
    double noise_floor = 0.0;
    std::vector<AblationCell> cells;
    std::vector<AblationSummary> summary;
    std::vector<AblationRow> rows;
};

struct SscResult {
    SscReport report;
    double fd_monotonic = 0.0;
    double fd_single_reheat = 0.0;
    double fd_damped_osc = 0.0;
    int n_samples = 0;
};

struct ParetoRow {
    std::string method;
    double eta = 0.0;
    int nfe = 0;
    int max_nfe_used = 0;
    double mean_nfe_used = 0.0;
    double fd = 0.0;
};

RunReport cmd_run(const ExperimentConfig& config, int workers);
AblationReport cmd_ablation(const ExperimentConfig& config, int workers);
SscResult cmd_ssc(const ExperimentConfig& config, int workers);
std::vector<ParetoRow> cmd_pareto(const ExperimentConfig& config, int workers);
Calibration cmd_calibrate(const ExperimentConfig& config, int workers);

// Serialisation. Output strings are byte-stable for a fixed config and seed.
std::string to_json(const ExperimentConfig& config);
std::string to_json(const RunReport& report, const ExperimentConfig& config);
std::string to_json(const AblationReport& report, const ExperimentConfig& config);
std::string to_json(const SscResult& result, const ExperimentConfig& config);
std::string to_json(const Calibration& calibration, const ExperimentConfig& config);
std::string ablation_csv(const AblationReport& report);
std::string ablation_summary_csv(const AblationReport& report);
std::string ablation_rows_csv(const AblationReport& report);
std::string pareto_csv(const std::vector<ParetoRow>& rows);
std::string error_json(const std::string& code, const std::string& message);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace reheat
