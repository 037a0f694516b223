#include "reheat/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "reheat/errors.hpp"

namespace reheat {

using nlohmann::ordered_json;
namespace pt = boost::property_tree;

// ---------------------------------------------------------------- config

GmmSpec ModelConfig::gmm() const {
    if (shape == "ring") return GmmSpec::ring(components, radius, std, dim);
    if (shape == "single") return GmmSpec::single(dim, std, Vec::Zero(dim));
    fail(ErrorCode::Config, "model.shape must be ring or single");
}

Denoiser ModelConfig::build(Family family) const {
    Denoiser base = Denoiser::bayes(family, gmm());
    if (denoiser == "bayes") return base;
    if (denoiser == "perturbed") {
        return perturb(base, perturbation.eps_amp, perturbation.center, perturbation.width, perturbation.field_seed);
    }
    fail(ErrorCode::Config, "model.denoiser must be bayes or perturbed");
}

Process ExperimentConfig::process() const {
    switch (family) {
        case Family::Ddpm: return alphabar;
        case Family::Edm: return edm;
        case Family::Fm: return flow;
    }
    fail(ErrorCode::Config, "unknown family");
}

Schedule ExperimentConfig::schedule(int N) const { return schedule(kind, N); }

Schedule ExperimentConfig::schedule(ScheduleKind which, int N) const {
    switch (which) {
        case ScheduleKind::SingleReheat: return make_schedule(process(), which, N, single_reheat);
        case ScheduleKind::Sawtooth: return make_schedule(process(), which, N, sawtooth);
        case ScheduleKind::DampedOsc: return make_schedule(process(), which, N, damped_osc);
        case ScheduleKind::Adaptive: return base_monotonic(process(), N);
        default: return make_schedule(process(), which, N);
    }
}

void ExperimentConfig::validate() const {
    edm.validate();
    flow.validate();
    model.gmm().validate();
    require(model.denoiser == "bayes" || model.denoiser == "perturbed", ErrorCode::Config,
            "model.denoiser must be bayes or perturbed");
    require(nfe >= 5, ErrorCode::Config, "schedule.nfe must be at least 5");
    require(!nfe_list.empty(), ErrorCode::Config, "experiment.nfe_list is empty");
    for (int n : nfe_list) require(n >= 5, ErrorCode::Config, "experiment.nfe_list entries must be at least 5");
    require(n_samples > model.dim && n_reference > model.dim, ErrorCode::Config,
            "sample counts must exceed the dimension");
    require(floor_runs >= 10, ErrorCode::Config, "experiment.floor_runs must be at least 10");
    require(ablation_nfe >= 5, ErrorCode::Config, "experiment.ablation_nfe must be at least 5");
    for (double p : positions) require(p > 0.0 && p < 1.0, ErrorCode::Config, "positions must lie in (0, 1)");
    for (double d : deltas) require(d > 0.0, ErrorCode::Config, "deltas must be positive");
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::Config, "sampler.eta must lie in [0, 1]");
    require(percentile > 0.0 && percentile <= 100.0, ErrorCode::Config, "schedule.percentile must lie in (0, 100]");
    require(k_cal >= 1, ErrorCode::Config, "schedule.k_cal must be at least 1");
    require(adaptive.delta_tau >= 1 && adaptive.max_reheats >= 0, ErrorCode::Config, "invalid adaptive parameters");
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(ErrorCode::Config, "cannot parse " + key + " = '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    fail(ErrorCode::Config, "cannot parse " + key + " = '" + text + "' as a boolean");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        out.push_back(parse_number<T>(key, item));
    }
    require(!out.empty(), ErrorCode::Config, key + " is empty");
    return out;
}

std::optional<double> parse_optional(const std::string& key, const std::string& text) {
    if (text == "none") return std::nullopt;
    return parse_number<double>(key, text);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

#define NUM(field, type) [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<type>(k, v); }

const std::map<std::string, std::map<std::string, Setter>>& config_keys() {
    static const std::map<std::string, std::map<std::string, Setter>> keys = {
        {"process",
         {
             {"family", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.family = parse_family(v); }},
             {"T", NUM(alphabar.T, int)},
             {"beta_start", NUM(alphabar.beta_start, double)},
             {"beta_end", NUM(alphabar.beta_end, double)},
             {"sigma_min", NUM(edm.sigma_min, double)},
             {"sigma_max", NUM(edm.sigma_max, double)},
             {"rho", NUM(edm.rho, double)},
             {"t_min", NUM(flow.t_min, double)},
             {"t_max", NUM(flow.t_max, double)},
         }},
        {"schedule",
         {
             {"kind", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.kind = parse_schedule_kind(v); }},
             {"nfe", NUM(nfe, int)},
             {"t_reheat", NUM(single_reheat.t_reheat, double)},
             {"delta", NUM(single_reheat.delta, double)},
             {"period", NUM(sawtooth.period, int)},
             {"delta_st", NUM(sawtooth.delta, double)},
             {"amplitude", NUM(damped_osc.amplitude, double)},
             {"damping", NUM(damped_osc.damping, double)},
             {"frequency", NUM(damped_osc.frequency, double)},
             {"delta_tau_ar", NUM(adaptive.delta_tau, int)},
             {"max_reheats", NUM(adaptive.max_reheats, int)},
             {"percentile", NUM(percentile, double)},
             {"k_cal", NUM(k_cal, int)},
             {"threshold", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.threshold = parse_optional(k, v); }},
         }},
        {"model",
         {
             {"shape", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model.shape = v; }},
             {"components", NUM(model.components, int)},
             {"radius", NUM(model.radius, double)},
             {"std", NUM(model.std, double)},
             {"dim", NUM(model.dim, int)},
             {"denoiser", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model.denoiser = v; }},
             {"eps_amp", NUM(model.perturbation.eps_amp, double)},
             {"center", NUM(model.perturbation.center, double)},
             {"width", NUM(model.perturbation.width, double)},
             {"field_seed", NUM(model.perturbation.field_seed, std::uint64_t)},
         }},
        {"sampler",
         {
             {"eta", NUM(eta, double)},
             {"clip", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.clip = parse_optional(k, v); }},
             {"integrator",
              [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                  if (v == "euler") c.integrator = EdmIntegrator::Euler;
                  else if (v == "heun") c.integrator = EdmIntegrator::Heun;
                  else fail(ErrorCode::Config, k + " must be euler or heun");
              }},
         }},
        {"experiment",
         {
             {"nfe_list", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.nfe_list = parse_list<int>(k, v); }},
             {"n_samples", NUM(n_samples, int)},
             {"n_reference", NUM(n_reference, int)},
             {"seed", NUM(seed, std::uint64_t)},
             {"floor_runs", NUM(floor_runs, int)},
             {"ablation_nfe", NUM(ablation_nfe, int)},
             {"positions", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.positions = parse_list<double>(k, v); }},
             {"deltas", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.deltas = parse_list<double>(k, v); }},
             {"pareto_adaptive", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.pareto_adaptive = parse_bool(k, v); }},
         }},
    };
    return keys;
}

#undef NUM

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream stream(text);
    try {
        pt::read_ini(stream, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorCode::Config, e.what());
    }
    ExperimentConfig config;
    const auto& keys = config_keys();
    for (const auto& [section, body] : tree) {
        const auto known = keys.find(section);
        require(known != keys.end() && !body.empty(), ErrorCode::Config, "unknown config section or key '" + section + "'");
        for (const auto& [key, node] : body) {
            const auto setter = known->second.find(key);
            require(setter != known->second.end(), ErrorCode::Config, "unknown config key '" + section + "." + key + "'");
            setter->second(config, section + "." + key, node.data());
        }
    }
    config.alphabar = build_linear_alphabar(config.alphabar.T, config.alphabar.beta_start, config.alphabar.beta_end);
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

// ---------------------------------------------------------------- lab

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return mix64(mix64(seed ^ mix64(purpose)) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

Lab::Lab(ExperimentConfig config, int workers)
    : config_(std::move(config)), workers_(workers), denoiser_(config_.model.build(config_.family)) {
    require(workers_ >= 1, ErrorCode::Parameter, "workers must be at least 1");
    const GmmSpec gmm = config_.model.gmm();
    reference_ = fit_gaussian(gmm.sample(config_.n_reference, derive_seed(config_.seed, 2, 0), Stream::Reference));
}

CleanFn Lab::clean_fn() const {
    return [d = denoiser_](const Vec& x, const NoiseLevel& level) { return d.clean(x, level); };
}

SamplerConfig Lab::sampler(std::uint64_t seed, double eta) const {
    SamplerConfig s;
    s.eta = eta;
    s.clip = config_.clip;
    s.base_seed = seed;
    s.workers = workers_;
    s.integrator = config_.integrator;
    return s;
}

SampleRun Lab::sample(const Schedule& schedule, std::uint64_t seed, double eta) const {
    return run_sampler(schedule, clean_fn(), config_.model.dim, config_.n_samples, sampler(seed, eta));
}

double Lab::fd(const Mat& samples) const { return frechet_distance(fit_gaussian(samples), reference_); }

double Lab::fd(const Schedule& schedule, std::uint64_t seed, double eta) const {
    return fd(sample(schedule, seed, eta).samples);
}

double Lab::noise_floor(int N) const {
    const Schedule mono = config_.schedule(ScheduleKind::Monotonic, N);
    const GmmSpec gmm = config_.model.gmm();
    std::vector<double> values;
    for (int k = 1; k <= config_.floor_runs; ++k) {
        const auto u = static_cast<std::uint64_t>(k);
        const GaussianFit ref = fit_gaussian(gmm.sample(config_.n_reference, derive_seed(config_.seed, 2, u), Stream::Reference));
        const Mat samples = sample(mono, derive_seed(config_.seed, 1, u), config_.eta).samples;
        values.push_back(frechet_distance(fit_gaussian(samples), ref));
    }
    return sample_std(values);
}

double Lab::exact_baseline() const {
    const GmmSpec gmm = config_.model.gmm();
    return fd(gmm.sample(config_.n_samples, derive_seed(config_.seed, 3, 0), Stream::Probe));
}

// ---------------------------------------------------------------- commands

namespace {

std::uint64_t main_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 1, 0); }

Calibration calibrate_for(const Lab& lab, int N) {
    const auto& c = lab.config();
    require(c.family == Family::Ddpm, ErrorCode::Unsupported, "adaptive calibration is defined for DDPM");
    return calibrate_ar_threshold(lab.clean_fn(), c.alphabar, c.model.dim, N, c.k_cal, c.percentile,
                                  derive_seed(c.seed, 5, static_cast<std::uint64_t>(N)));
}

SampleRun adaptive_run(const Lab& lab, int N, double eta, std::optional<Calibration>* calibration) {
    const auto& c = lab.config();
    require(c.family == Family::Ddpm, ErrorCode::Unsupported, "adaptive reheating is defined for DDPM");
    AdaptiveParams params = c.adaptive;
    if (c.threshold) {
        params.threshold = *c.threshold;
    } else {
        const Calibration cal = calibrate_for(lab, N);
        params.threshold = cal.threshold;
        if (calibration) *calibration = cal;
    }
    return run_adaptive(base_monotonic(c.process(), N), lab.clean_fn(), params, c.model.dim, c.n_samples,
                        lab.sampler(main_seed(c), eta));
}

}  // namespace

RunReport cmd_run(const ExperimentConfig& config, int workers) {
    const Lab lab(config, workers);
    const int N = config.nfe;
    RunReport report;
    report.kind = std::string(to_string(config.kind));
    report.nfe = N;

    const Schedule mono = config.schedule(ScheduleKind::Monotonic, N);
    report.fd_monotonic = lab.fd(mono, main_seed(config), config.eta);

    SampleRun run;
    if (config.kind == ScheduleKind::Adaptive) {
        run = adaptive_run(lab, N, config.eta, &report.calibration);
    } else {
        const Schedule s = config.schedule(N);
        report.overhead = overhead(s);
        report.reheat_steps = static_cast<int>(reheat_indices(s).size());
        run = lab.sample(s, main_seed(config), config.eta);
    }
    report.fd = lab.fd(run.samples);
    report.penalty = penalty(report.fd, report.fd_monotonic);
    report.max_nfe_used = run.max_nfe();
    report.mean_nfe_used = run.mean_nfe();
    report.reheats_fired = run.total_reheats();
    report.noise_floor = lab.noise_floor(N);
    report.exact_baseline = lab.exact_baseline();
    return report;
}

AblationReport cmd_ablation(const ExperimentConfig& config, int workers) {
    const Lab lab(config, workers);
    AblationReport report;
    report.nfe = config.ablation_nfe;
    const Schedule mono = config.schedule(ScheduleKind::Monotonic, report.nfe);
    report.fd_monotonic = lab.fd(mono, main_seed(config), config.eta);
    report.noise_floor = lab.noise_floor(report.nfe);

    for (double position : config.positions) {
        std::vector<double> row;
        for (double delta : config.deltas) {
            const Schedule s = single_reheat(mono, {position, delta});
            AblationCell cell;
            cell.position = position;
            cell.delta = delta;
            cell.fd = lab.fd(s, main_seed(config), config.eta);
            cell.penalty = penalty(cell.fd, report.fd_monotonic);
            cell.reheat_steps = static_cast<int>(reheat_indices(s).size());
            report.cells.push_back(cell);
            row.push_back(cell.penalty);
        }
        if (config.deltas.size() >= 3) report.rows.push_back({position, linear_slope_fit(config.deltas, row)});
    }

    const std::size_t columns = config.deltas.size();
    for (std::size_t j = 0; j < columns; ++j) {
        std::vector<double> column;
        for (std::size_t i = 0; i < config.positions.size(); ++i) column.push_back(report.cells[i * columns + j].penalty);
        std::sort(column.begin(), column.end());
        AblationSummary s;
        s.delta = config.deltas[j];
        s.min = column.front();
        s.max = column.back();
        s.median = percentile_of(column, 50.0);
        s.improving = static_cast<int>(
            std::count_if(column.begin(), column.end(), [&](double p) { return p < -report.noise_floor; }));
        report.summary.push_back(s);
    }
    return report;
}

SscResult cmd_ssc(const ExperimentConfig& config, int workers) {
    const Lab lab(config, workers);
    const int N = *std::max_element(config.nfe_list.begin(), config.nfe_list.end());
    SscResult result;
    result.n_samples = config.n_samples;
    result.fd_monotonic = lab.fd(config.schedule(ScheduleKind::Monotonic, N), main_seed(config), config.eta);
    result.fd_single_reheat = lab.fd(config.schedule(ScheduleKind::SingleReheat, N), main_seed(config), config.eta);
    result.fd_damped_osc = lab.fd(config.schedule(ScheduleKind::DampedOsc, N), main_seed(config), config.eta);
    result.report = ssc(penalty(result.fd_damped_osc, result.fd_monotonic),
                        penalty(result.fd_single_reheat, result.fd_monotonic), lab.noise_floor(N));
    result.report.nfe = N;
    return result;
}

std::vector<ParetoRow> cmd_pareto(const ExperimentConfig& config, int workers) {
    require(config.family == Family::Ddpm, ErrorCode::Unsupported, "the eta sweep is defined for DDPM");
    const Lab lab(config, workers);
    struct Method {
        const char* name;
        ScheduleKind kind;
        double eta;
    };
    const Method methods[] = {{"monotonic_eta0", ScheduleKind::Monotonic, 0.0},
                              {"monotonic_eta1", ScheduleKind::Monotonic, 1.0},
                              {"single_reheat_eta0", ScheduleKind::SingleReheat, 0.0},
                              {"single_reheat_eta0.5", ScheduleKind::SingleReheat, 0.5}};
    std::vector<ParetoRow> rows;
    for (int N : config.nfe_list) {
        for (const auto& m : methods) {
            const SampleRun run = lab.sample(config.schedule(m.kind, N), main_seed(config), m.eta);
            rows.push_back({m.name, m.eta, N, run.max_nfe(), run.mean_nfe(), lab.fd(run.samples)});
        }
        if (config.pareto_adaptive) {
            const SampleRun run = adaptive_run(lab, N, 0.0, nullptr);
            rows.push_back({"adaptive_eta0", 0.0, N, run.max_nfe(), run.mean_nfe(), lab.fd(run.samples)});
        }
    }
    return rows;
}

Calibration cmd_calibrate(const ExperimentConfig& config, int workers) {
    const Lab lab(config, workers);
    return calibrate_for(lab, config.nfe);
}

// ---------------------------------------------------------------- output

namespace {

ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

ordered_json header(const char* report, const ExperimentConfig& config) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["report"] = report;
    j["config"] = ordered_json::parse(to_json(config));
    return j;
}

ordered_json calibration_json(const Calibration& c) {
    ordered_json j;
    j["threshold"] = number(c.threshold);
    j["percentile"] = c.percentile;
    j["k_cal"] = c.k_cal;
    j["nfe"] = c.nfe;
    j["calibration_nfe"] = c.calibration_nfe;
    j["values_collected"] = c.values_collected;
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["process"] = {{"family", to_string(c.family)},
                    {"T", c.alphabar.T},
                    {"beta_start", c.alphabar.beta_start},
                    {"beta_end", c.alphabar.beta_end},
                    {"sigma_min", c.edm.sigma_min},
                    {"sigma_max", c.edm.sigma_max},
                    {"rho", c.edm.rho},
                    {"t_min", c.flow.t_min},
                    {"t_max", c.flow.t_max}};
    j["schedule"] = {{"kind", to_string(c.kind)},
                     {"nfe", c.nfe},
                     {"t_reheat", c.single_reheat.t_reheat},
                     {"delta", c.single_reheat.delta},
                     {"period", c.sawtooth.period},
                     {"delta_st", c.sawtooth.delta},
                     {"amplitude", c.damped_osc.amplitude},
                     {"damping", c.damped_osc.damping},
                     {"frequency", c.damped_osc.frequency},
                     {"delta_tau_ar", c.adaptive.delta_tau},
                     {"max_reheats", c.adaptive.max_reheats},
                     {"percentile", c.percentile},
                     {"k_cal", c.k_cal},
                     {"threshold", c.threshold ? number(*c.threshold) : ordered_json("none")}};
    j["model"] = {{"shape", c.model.shape},
                  {"components", c.model.components},
                  {"radius", c.model.radius},
                  {"std", c.model.std},
                  {"dim", c.model.dim},
                  {"denoiser", c.model.denoiser},
                  {"eps_amp", c.model.perturbation.eps_amp},
                  {"center", c.model.perturbation.center},
                  {"width", c.model.perturbation.width},
                  {"field_seed", c.model.perturbation.field_seed}};
    j["sampler"] = {{"eta", c.eta},
                    {"clip", c.clip ? ordered_json(*c.clip) : ordered_json("none")},
                    {"integrator", c.integrator == EdmIntegrator::Heun ? "heun" : "euler"}};
    j["experiment"] = {{"nfe_list", c.nfe_list},
                       {"n_samples", c.n_samples},
                       {"n_reference", c.n_reference},
                       {"seed", c.seed},
                       {"floor_runs", c.floor_runs},
                       {"ablation_nfe", c.ablation_nfe},
                       {"positions", c.positions},
                       {"deltas", c.deltas},
                       {"pareto_adaptive", c.pareto_adaptive}};
    return j.dump();
}

std::string to_json(const RunReport& r, const ExperimentConfig& config) {
    ordered_json j = header("run", config);
    j["kind"] = r.kind;
    j["nfe"] = r.nfe;
    j["fd"] = r.fd;
    j["fd_monotonic"] = r.fd_monotonic;
    j["penalty"] = r.penalty;
    j["noise_floor"] = r.noise_floor;
    j["below_floor"] = std::abs(r.penalty) < r.noise_floor;
    j["exact_baseline"] = r.exact_baseline;
    j["overhead"] = r.overhead;
    j["reheat_steps"] = r.reheat_steps;
    j["max_nfe_used"] = r.max_nfe_used;
    j["mean_nfe_used"] = r.mean_nfe_used;
    j["reheats_fired"] = r.reheats_fired;
    if (r.calibration) j["calibration"] = calibration_json(*r.calibration);
    return dump(j);
}

std::string to_json(const AblationReport& r, const ExperimentConfig& config) {
    ordered_json j = header("ablation", config);
    j["nfe"] = r.nfe;
    j["fd_monotonic"] = r.fd_monotonic;
    j["noise_floor"] = r.noise_floor;
    j["cells"] = ordered_json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"position", c.position},
                              {"delta", c.delta},
                              {"fd", c.fd},
                              {"penalty", c.penalty},
                              {"reheat_steps", c.reheat_steps}});
    }
    j["summary"] = ordered_json::array();
    for (const auto& s : r.summary) {
        j["summary"].push_back(
            {{"delta", s.delta}, {"min", s.min}, {"median", s.median}, {"max", s.max}, {"improving", s.improving}});
    }
    j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"position", row.position},
                             {"intercept", row.fit.intercept},
                             {"slope", row.fit.slope},
                             {"r2", row.fit.r2}});
    }
    return dump(j);
}

std::string to_json(const SscResult& s, const ExperimentConfig& config) {
    ordered_json j = header("ssc", config);
    j["nfe"] = s.report.nfe;
    j["n_samples"] = s.n_samples;
    j["fd_monotonic"] = s.fd_monotonic;
    j["fd_single_reheat"] = s.fd_single_reheat;
    j["fd_damped_osc"] = s.fd_damped_osc;
    j["delta_sr"] = s.report.delta_sr;
    j["delta_do"] = s.report.delta_do;
    j["ssc"] = number(s.report.ssc);
    j["unbounded"] = s.report.unbounded;
    j["noise_floor"] = s.report.noise_floor;
    j["delta_sr_below_floor"] = s.report.sr_below_floor;
    j["delta_do_below_floor"] = s.report.do_below_floor;
    if (!s.report.diagnostic.empty()) j["diagnostic"] = s.report.diagnostic;
    return dump(j);
}

std::string to_json(const Calibration& c, const ExperimentConfig& config) {
    ordered_json j = header("calibrate", config);
    j["calibration"] = calibration_json(c);
    return dump(j);
}

std::string ablation_csv(const AblationReport& r) {
    std::string out = "position,delta,fd,penalty,reheat_steps\n";
    for (const auto& c : r.cells) {
        out += fmt(c.position) + "," + fmt(c.delta) + "," + fmt(c.fd) + "," + fmt(c.penalty) + "," +
               std::to_string(c.reheat_steps) + "\n";
    }
    return out;
}

std::string ablation_summary_csv(const AblationReport& r) {
    std::string out = "delta,min,median,max,improving\n";
    for (const auto& s : r.summary) {
        out += fmt(s.delta) + "," + fmt(s.min) + "," + fmt(s.median) + "," + fmt(s.max) + "," +
               std::to_string(s.improving) + "\n";
    }
    return out;
}

std::string ablation_rows_csv(const AblationReport& r) {
    std::string out = "position,intercept,slope,r2\n";
    for (const auto& row : r.rows) {
        out += fmt(row.position) + "," + fmt(row.fit.intercept) + "," + fmt(row.fit.slope) + "," + fmt(row.fit.r2) + "\n";
    }
    return out;
}

std::string pareto_csv(const std::vector<ParetoRow>& rows) {
    std::string out = "method,eta,nfe,max_nfe_used,mean_nfe_used,fd\n";
    for (const auto& r : rows) {
        out += r.method + "," + fmt(r.eta) + "," + std::to_string(r.nfe) + "," + std::to_string(r.max_nfe_used) + "," +
               fmt(r.mean_nfe_used) + "," + fmt(r.fd) + "\n";
    }
    return out;
}

std::string error_json(const std::string& code, const std::string& message) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["error"] = {{"code", code}, {"message", message}};
    return j.dump() + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
    out << content;
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace reheat
