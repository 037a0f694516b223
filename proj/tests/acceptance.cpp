// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reheat/errors.hpp"
#include "reheat/harness.hpp"

namespace fs = std::filesystem;
using namespace reheat;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void expect(bool condition, const std::string& what) {
        if (!condition && pass) detail = what;
        pass = pass && condition;
    }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
    return buffer;
}

CleanFn fn_of(const Denoiser& d) {
    return [d](const Vec& x, const NoiseLevel& level) { return d.clean(x, level); };
}

// 1: golden schedule suite over families x kinds x N.
Outcome schedules_golden() {
    Outcome o;
    const Process ddpm = build_linear_alphabar(), edm = EdmRange{}, fm = FlowRange{};
    const std::vector<ScheduleKind> kinds{ScheduleKind::Monotonic, ScheduleKind::SingleReheat, ScheduleKind::Sawtooth,
                                          ScheduleKind::DampedOsc};
    int built = 0;
    for (const Process* p : {&ddpm, &edm, &fm}) {
        const Family f = family_of(*p);
        for (ScheduleKind k : kinds) {
            for (int N : {10, 25, 100}) {
                const std::string tag = std::string(to_string(f)) + "/" + std::string(to_string(k)) + "/N=" +
                                        std::to_string(N);
                if (f == Family::Fm && k == ScheduleKind::Sawtooth) {
                    bool unsupported = false;
                    try {
                        make_schedule(*p, k, N);
                    } catch (const Error& e) {
                        unsupported = e.code() == ErrorCode::Unsupported;
                    }
                    o.expect(unsupported, tag + " should be unsupported");
                    continue;
                }
                const Schedule s = make_schedule(*p, k, N);
                ++built;
                try {
                    validate(s);
                } catch (const Error& e) {
                    o.expect(false, tag + ": " + e.what());
                }
                o.expect(s.nfe() == N && s.kind == k && s.family == f, tag + " shape");
                const auto level = s.sigma_hats();
                o.expect(level.front() > level.back(), tag + " endpoints");
                const auto r = reheat_indices(s);
                const double oh = overhead(s);
                o.expect(oh >= 0.0 && std::isfinite(oh), tag + " overhead");
                o.expect(r.empty() == (oh == 0.0), tag + " overhead vs reheat set");
                if (k == ScheduleKind::Monotonic) o.expect(r.empty(), tag + " monotonic reheats");
                // On coarse grids the pulled-back target can sit below its predecessor.
                if (k == ScheduleKind::SingleReheat) o.expect(r.size() <= 1, tag + " at most one reheat");
                if (k == ScheduleKind::SingleReheat && f != Family::Edm && N >= 25) {
                    o.expect(r.size() == 1, tag + " one reheat");
                }
                for (int i : r) {
                    o.expect(i > 0 && i < N - 1, tag + " reheat touches an endpoint");
                }
            }
        }
    }
    o.expect(built == 33, "expected 11 constructible combinations at 3 sizes");

    auto at = [](const Schedule& s, int i) { return s.values[static_cast<std::size_t>(i)]; };
    const Schedule d10 = base_monotonic(ddpm, 10);
    o.expect(at(d10, 0) == 999 && at(d10, 1) == 899 && at(d10, 5) == 500 && at(d10, 10) == 0, "DDPM monotonic N=10");
    const Schedule sr25 = single_reheat(base_monotonic(ddpm, 25));
    o.expect(at(sr25, 9) == 639 && at(sr25, 10) == 688, "SR DDPM N=25 reheat value 688");
    const Schedule st100 = sawtooth(base_monotonic(ddpm, 100));
    // tau + floor(0.08 tau) at tau = 749, 500, 250
    o.expect(at(st100, 25) == 808 && at(st100, 50) == 540 && at(st100, 75) == 270, "ST DDPM N=100 jumps");
    o.expect(at(damped_osc(ddpm, 100), 50) == 500, "DO DDPM N=100 midpoint");

    const Schedule e10 = base_monotonic(edm, 10);
    const double a = std::pow(80.0, 1.0 / 7), b = std::pow(0.002, 1.0 / 7);
    o.expect(std::abs(at(e10, 4) - std::pow(a + 4.0 / 9 * (b - a), 7)) < 1e-12, "EDM Karras spot value");
    o.expect(at(e10, 10) == 0.0, "EDM terminal zero");
    const Schedule e100 = base_monotonic(edm, 100), est = sawtooth(e100);
    o.expect(at(est, 25) == at(e100, 21), "EDM sawtooth look-back of 4");

    const Schedule f25 = base_monotonic(fm, 25);
    o.expect(std::abs(at(f25, 10) - (0.001 + 10 * 0.998 / 25)) < 1e-15, "FM linear grid");
    o.expect(std::abs(at(single_reheat(f25), 10) - 0.85 * at(f25, 10)) < 1e-15, "FM SR pull-back");

    for (const Process* p : {&ddpm, &edm, &fm}) {
        const Schedule flat = damped_osc(*p, 25, {0.0, 2.5, 4.0}), mono = base_monotonic(*p, 25);
        for (std::size_t i = 0; i < flat.values.size(); ++i) {
            o.expect(std::abs(flat.values[i] - mono.values[i]) <= 1e-12 * std::max(1.0, mono.values[i]),
                     "zero-amplitude DO equals monotonic");
        }
    }
    if (o.pass) o.detail = std::to_string(built) + " schedules + FM sawtooth rejected";
    return o;
}

// 2: random non-monotonic schedules stay finite on a perturbed denoiser.
Outcome validity() {
    Outcome o;
    const GmmSpec g = GmmSpec::ring();
    int runs = 0, reheats = 0;
    for (Family f : {Family::Ddpm, Family::Edm, Family::Fm}) {
        const Process process = f == Family::Ddpm ? Process{build_linear_alphabar()}
                                : f == Family::Edm ? Process{EdmRange{}}
                                                   : Process{FlowRange{}};
        const Denoiser d = perturb(Denoiser::bayes(f, g), 0.5, f == Family::Edm ? 1.0 : 0.5, 0.3, 17);
        const CleanFn fn = fn_of(d);
        for (int trial = 0; trial < 100; ++trial) {
            CounterRng rng(2024, Stream::Schedule, static_cast<std::uint64_t>(trial) * 3 + static_cast<int>(f));
            const int N = 10 + static_cast<int>(rng.next_u64() % 91);
            std::vector<double> v(static_cast<std::size_t>(N) + 1);
            for (int i = 1; i < N; ++i) {
                const double u = rng.uniform();
                switch (f) {
                    case Family::Ddpm: v[i] = std::floor(u * 1000.0); break;
                    case Family::Edm: v[i] = 0.002 * std::pow(80.0 / 0.002, u); break;
                    case Family::Fm: v[i] = 0.001 + 0.998 * u; break;
                }
            }
            v.front() = f == Family::Ddpm ? 999 : f == Family::Edm ? 80.0 : 0.001;
            v.back() = f == Family::Ddpm ? 0 : f == Family::Edm ? 0.0 : 0.999;
            const Schedule s = custom_schedule(process, v);
            reheats += static_cast<int>(reheat_indices(s).size());
            SamplerConfig cfg;
            cfg.base_seed = static_cast<std::uint64_t>(trial);
            cfg.eta = f == Family::Ddpm ? 0.5 * static_cast<double>(trial % 3) : 0.0;
            try {
                const SampleRun run = run_sampler(s, fn, g.dim, 64, cfg);
                o.expect(run.samples.allFinite(), "non-finite samples");
            } catch (const Error& e) {
                o.expect(false, std::string(to_string(f)) + " trial " + std::to_string(trial) + ": " + e.what());
            }
            ++runs;
        }
    }
    if (o.pass) o.detail = std::to_string(runs) + " runs, " + std::to_string(reheats) + " reheat steps, all finite";
    return o;
}

// 3: Bayes denoisers against importance-sampling posterior means.
Outcome bayes_oracle() {
    Outcome o;
    int probes = 0;
    double worst = 0.0;
    for (int family = 0; family < 3; ++family) {
        for (int probe = 0; probe < 20; ++probe) {
            CounterRng rng(77, Stream::Probe, static_cast<std::uint64_t>(family * 100 + probe));
            const GmmSpec g = oracle::random_gmm(rng);
            const std::uint64_t mc_seed = 1000 + static_cast<std::uint64_t>(family * 100 + probe);
            oracle::McMean mc;
            Vec got;
            if (family == 0) {
                const double ab = 0.2 + 0.7 * rng.uniform();
                const NoiseLevel level{std::sqrt(ab), std::sqrt(1 - ab)};
                const Vec x = sample_marginal(g, level, rng);
                mc = oracle::posterior_mc(g, x, level, 1'000'000, mc_seed);
                got = bayes_vp(x, ab, g);
            } else if (family == 1) {
                const double sigma = 0.3 + 1.7 * rng.uniform();
                const NoiseLevel level{1.0, sigma};
                const Vec x = sample_marginal(g, level, rng);
                mc = oracle::posterior_mc(g, x, level, 1'000'000, mc_seed);
                got = bayes_ve(x, sigma, g);
            } else {
                const double t = 0.2 + 0.6 * rng.uniform();
                const NoiseLevel level{t, 1 - t};
                const Vec x = sample_marginal(g, level, rng);
                mc = oracle::posterior_mc(g, x, level, 1'000'000, mc_seed, 1.0 / (1 - t), -1.0 / (1 - t));
                got = bayes_fm_velocity(x, t, g);
            }
            const double z = (got - mc.mean).norm() / mc.norm_error();
            worst = std::max(worst, z);
            o.expect(z <= 3.0, "probe outside 3 SE");
            ++probes;
        }
    }

    CounterRng rng(2, Stream::Probe, 0);
    double closed = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 7);
        const double s = 0.1 + 2.0 * rng.uniform();
        Vec m(d), x(d);
        for (int j = 0; j < d; ++j) {
            m[j] = rng.normal();
            x[j] = 3.0 * rng.normal();
        }
        const GmmSpec g = GmmSpec::single(d, s, m);
        const double ab = 0.01 + 0.98 * rng.uniform(), sigma = 5.0 * rng.uniform(), t = 0.01 + 0.98 * rng.uniform();
        const double a = std::sqrt(ab);
        const Vec vp = m + (a * s * s / (ab * s * s + 1.0 - ab)) * (x - a * m);
        const Vec ve = m + (s * s / (s * s + sigma * sigma)) * (x - m);
        const Vec x0 = m + (t * s * s / (t * t * s * s + (1 - t) * (1 - t))) * (x - t * m);
        const Vec v = (x0 - x) / (1 - t);
        closed = std::max({closed, (bayes_vp(x, ab, g) - vp).lpNorm<Eigen::Infinity>(),
                           (bayes_ve(x, sigma, g) - ve).lpNorm<Eigen::Infinity>(),
                           (bayes_fm_velocity(x, t, g) - v).lpNorm<Eigen::Infinity>()});
    }
    o.expect(closed < 1e-10, fmt("closed-form gap %.3g", closed));
    if (o.pass) {
        o.detail = std::to_string(probes) + " probes, worst " + fmt("%.2f SE; closed-form gap %.2g", worst, closed);
    }
    return o;
}

// 4: SSC certificate on Bayes and perturbed denoisers.
Outcome ssc_certificate(const fs::path& configs, int workers) {
    Outcome o;
    const SscResult bayes = cmd_ssc(load_config(configs / "ssc_bayes.ini"), workers);
    const SscReport& b = bayes.report;
    o.expect(b.nfe == 100, "Bayes SSC not at N=100");
    o.expect(std::abs(b.delta_sr) < 2 * b.noise_floor, fmt("Bayes SR penalty %.4g vs floor %.4g", b.delta_sr, b.noise_floor));
    o.expect(std::abs(b.delta_do) < 2 * b.noise_floor, fmt("Bayes DO penalty %.4g vs floor %.4g", b.delta_do, b.noise_floor));
    o.expect(b.ssc == 0.0, "Bayes SSC nonzero");

    const SscResult pert = cmd_ssc(load_config(configs / "ssc_perturbed.ini"), workers);
    const SscReport& p = pert.report;
    o.expect(p.delta_sr >= 5 * p.noise_floor, fmt("perturbed SR penalty %.4g < 5 x floor %.4g", p.delta_sr, p.noise_floor));
    o.expect(p.ssc > 0.0, "perturbed SSC not positive");
    if (o.pass) {
        o.detail = fmt("Bayes: SR %.4f, DO %.4f, floor %.4f, SSC 0; ", b.delta_sr, b.delta_do, b.noise_floor) +
                   fmt("perturbed: SR %.4f (%.1f x floor), DO %.4f, SSC %.3f", p.delta_sr, p.delta_sr / p.noise_floor,
                       p.delta_do, p.ssc);
    }
    return o;
}

// 5 and 6 share one ablation run.
Outcome linearity(const AblationReport& r) {
    Outcome o;
    const AblationRow* near = nullptr;
    double distant = -INFINITY;
    for (const auto& row : r.rows) {
        if (std::abs(row.position - 0.8) < 1e-9) near = &row;
        if (row.position <= 0.5 + 1e-9) distant = std::max(distant, row.fit.slope);
    }
    if (!near) {
        o.expect(false, "no row at t_reheat 0.8");
        return o;
    }
    o.expect(near->fit.r2 >= 0.8, fmt("R^2 %.3f below 0.8", near->fit.r2));
    o.expect(near->fit.slope > 0.0 && near->fit.slope >= 2.0 * distant,
             fmt("slope %.4g vs distant max %.4g", near->fit.slope, distant));
    o.detail = fmt("t_reheat 0.8: slope %.4f, R^2 %.3f; distant max slope %.4f (ratio %.1f)", near->fit.slope,
                   near->fit.r2, distant, near->fit.slope / std::max(distant, 1e-300));
    return o;
}

Outcome monotone_in_delta(const AblationReport& r) {
    Outcome o;
    const double floor = r.noise_floor;
    std::map<double, std::vector<std::pair<double, double>>> rows;
    int beating = 0;
    for (const auto& c : r.cells) {
        rows[c.position].emplace_back(c.delta, c.penalty);
        beating += c.penalty < -floor;
    }
    int violations = 0;
    for (auto& [position, cells] : rows) {
        std::sort(cells.begin(), cells.end());
        for (std::size_t j = 1; j < cells.size(); ++j) violations += cells[j].second < cells[j - 1].second - floor;
    }
    o.expect(r.cells.size() == 42, "grid is not 7 x 6");
    o.expect(violations == 0, std::to_string(violations) + " adjacent decreases beyond the floor");
    o.expect(beating == 0, std::to_string(beating) + " cells beat the control");
    if (o.pass) o.detail = fmt("42 cells, floor %.4f, no decreases beyond floor, 0 cells improve", floor);
    return o;
}

// 7: arithmetic on published numbers.
Outcome paper_numbers() {
    Outcome o;
    const double b = powerlaw_fit(std::vector<double>{10, 25, 50, 100}, std::vector<double>{33.34, 7.30, 2.96, 1.31})
                         .exponent;
    o.expect(std::abs(b - 1.40) <= 0.02, fmt("power-law exponent %.4f", b));
    const double s1 = ssc(1.314, 0.717).ssc, s2 = ssc(-0.003, 0.150).ssc;
    o.expect(std::abs(s1 - 1.83) <= 0.01, fmt("SSC %.4f", s1));
    o.expect(s2 == 0.0, "clipped SSC not zero");
    const auto p = paired_stats(std::vector<double>{38.97, 21.88, 17.33, 15.28, 59.13, 29.40, 20.54, 15.80},
                                std::vector<double>{39.79, 22.60, 18.09, 16.02, 59.93, 29.91, 20.89, 16.38});
    o.expect(std::abs(p.mean_offset - 0.66) <= 0.01, fmt("mean offset %.4f", p.mean_offset));
    o.expect(std::abs(p.offset_std - 0.16) <= 0.01, fmt("offset std %.4f", p.offset_std));
    o.expect(p.spearman == 1.0, "Spearman not 1");
    o.detail = fmt("b = %.3f, SSC = %.3f and %.0f, ", b, s1, s2) +
               fmt("offset %.3f +- %.3f, Spearman %.1f", p.mean_offset, p.offset_std, p.spearman);
    return o;
}

// 8: orthogonal decomposition of the injected noise.
Outcome decomposition() {
    Outcome o;
    double dot = 0.0, pyth = 0.0;
    for (int i = 0; i < 10000; ++i) {
        CounterRng rng(8, Stream::Probe, static_cast<std::uint64_t>(i));
        const int d = 2 + static_cast<int>(rng.next_u64() % 7);
        Vec z(d), e(d);
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        for (int j = 0; j < d; ++j) e[j] = rng.normal();
        const NoiseSplit s = decompose_noise(z, e);
        dot = std::max(dot, std::abs(s.orthogonal.dot(e.normalized())));
        pyth = std::max(pyth, std::abs(z.squaredNorm() - s.parallel.squaredNorm() - s.orthogonal.squaredNorm()));
    }
    o.expect(dot <= 1e-12, fmt("inner product %.3g", dot));
    o.expect(pyth <= 1e-10, fmt("Pythagoras gap %.3g", pyth));
    o.detail = fmt("10000 pairs: max |<z_perp, e>| %.2g, max norm gap %.2g", dot, pyth);
    return o;
}

// 9: one-step reheat displacement.
Outcome displacement() {
    Outcome o;
    const GmmSpec g = GmmSpec::ring();
    std::string detail;
    for (Family f : {Family::Ddpm, Family::Edm, Family::Fm}) {
        const double s = f == Family::Edm ? 1.0 : 0.7;
        const Denoiser bayes = Denoiser::bayes(f, g);
        const Denoiser small = perturb(bayes, 0.05, s, 0.1, 21), large = perturb(bayes, 0.10, s, 0.1, 21);
        auto stats = [&](const Denoiser& d) {
            CounterRng rng(9, Stream::Probe, static_cast<std::uint64_t>(f));
            std::vector<double> v;
            for (int i = 0; i < 2000; ++i) {
                const Vec x = sample_marginal(g, noise_level_from_sigma_hat(f, s), rng);
                v.push_back(reheat_displacement(x, s, s + 0.02, s - 0.05, d, f));
            }
            return v;
        };
        const auto zero = stats(bayes);
        const double mean = mean_of(zero), se = sample_std(zero) / std::sqrt(static_cast<double>(zero.size()));
        o.expect(std::abs(mean) <= 3.0 * se, std::string(to_string(f)) + fmt(" Bayes mean %.3g, SE %.3g", mean, se));
        const double rms_small = std::sqrt(mean_of(stats(small))), rms_large = std::sqrt(mean_of(stats(large)));
        const double ratio = rms_large / rms_small;
        o.expect(std::abs(ratio - 2.0) <= 0.4, std::string(to_string(f)) + fmt(" doubling ratio %.3f", ratio));
        detail += std::string(to_string(f)) + fmt(": Bayes mean %.2g, ratio %.3f; ", mean, ratio);
    }
    if (o.pass) o.detail = detail.substr(0, detail.size() - 2);
    return o;
}

// 10: every CLI verb, rerun and with other worker counts, writes identical bytes.
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& cli, const fs::path& work) {
    Outcome o;
    fs::remove_all(work);
    fs::create_directories(work);
    struct Case {
        std::string verb, name, ini;
    };
    const std::vector<Case> cases{
        {"schedule dump", "dump", "[schedule]\nkind = damped_osc\nnfe = 25\n"},
        {"run", "run_eta", "[schedule]\nkind = damped_osc\nnfe = 20\n[sampler]\neta = 1.0\n"
                           "[experiment]\nn_samples = 512\nn_reference = 512\nseed = 5\n"},
        {"run", "run_adaptive", "[schedule]\nkind = adaptive\nnfe = 20\nk_cal = 10\n"
                                "[experiment]\nn_samples = 512\nn_reference = 512\n"},
        {"ablation", "ablation", "[model]\ndenoiser = perturbed\neps_amp = 0.3\ncenter = 0.7\nwidth = 0.03\n"
                                 "[experiment]\nn_samples = 256\nn_reference = 256\nablation_nfe = 20\n"},
        {"ssc", "ssc", "[experiment]\nn_samples = 512\nn_reference = 512\nnfe_list = 20\n"},
        {"pareto", "pareto", "[schedule]\nk_cal = 10\n[experiment]\nn_samples = 256\nn_reference = 256\n"
                             "nfe_list = 10, 20\npareto_adaptive = true\n"},
        {"calibrate", "calibrate", "[schedule]\nnfe = 20\nk_cal = 20\n"},
    };
    int files = 0;
    for (const auto& c : cases) {
        const fs::path ini = work / (c.name + ".ini");
        std::ofstream(ini) << c.ini;
        std::vector<fs::path> outs;
        int attempt = 0;
        for (int workers : {1, 1, 3}) {
            const fs::path out = work / (c.name + "_" + std::to_string(attempt++));
            fs::create_directories(out);
            const std::string cmd = "\"" + cli.string() + "\" " + c.verb + " --config \"" + ini.string() +
                                    "\" --out \"" + out.string() + "\" --workers " + std::to_string(workers);
            o.expect(std::system(cmd.c_str()) == 0, c.name + " exited nonzero");
            outs.push_back(out);
        }
        for (const auto& entry : fs::directory_iterator(outs[0])) {
            const auto name = entry.path().filename();
            if (name == "timing.json") continue;
            const std::string first = slurp(entry.path());
            o.expect(!first.empty(), c.name + "/" + name.string() + " empty");
            for (std::size_t k = 1; k < outs.size(); ++k) {
                o.expect(slurp(outs[k] / name) == first, c.name + "/" + name.string() + " differs");
            }
            ++files;
        }
    }
    if (o.pass) o.detail = std::to_string(cases.size()) + " configs over 6 verbs, " + std::to_string(files) +
                           " output files identical across reruns and 1 vs 3 workers";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path cli = argc > 1 ? fs::path(argv[1]) : fs::path(REHEAT_CLI);
    const fs::path configs = argc > 2 ? fs::path(argv[2]) : fs::path(REHEAT_CONFIG_DIR);
    const fs::path work = fs::temp_directory_path() / "reheat_acceptance";
    const int workers = 1;

    struct Criterion {
        int id;
        std::string name;
        double budget;  // seconds; 0 when unbounded
        std::function<Outcome()> body;
    };
    AblationReport ablation;
    bool ablation_ready = false;
    auto get_ablation = [&]() -> const AblationReport& {
        if (!ablation_ready) {
            ablation = cmd_ablation(load_config(configs / "ablation_perturbed.ini"), workers);
            ablation_ready = true;
        }
        return ablation;
    };
    const std::vector<Criterion> criteria{
        {1, "schedule golden suite", 1.0, schedules_golden},
        {2, "validity of random non-monotonic schedules", 30.0, validity},
        {3, "Bayes denoisers match Monte-Carlo oracles", 120.0, bayes_oracle},
        {4, "SSC certificate", 300.0, [&] { return ssc_certificate(configs, workers); }},
        {5, "penalty linear in reheat magnitude", 0.0, [&] { return linearity(get_ablation()); }},
        {6, "penalty monotone in magnitude, no cell beats the control", 0.0,
         [&] { return monotone_in_delta(get_ablation()); }},
        {7, "published-number arithmetic", 1.0, paper_numbers},
        {8, "noise decomposition", 0.0, decomposition},
        {9, "per-step reheat displacement", 0.0, displacement},
        {10, "byte-identical CLI outputs", 0.0, [&] { return determinism(cli, work); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget > 0.0 && seconds > c.budget) o.expect(false, fmt("took %.1f s, budget %.0f s", seconds, c.budget));
        failures += !o.pass;
        std::printf("Criterion %d: %s  %s [%.2f s] %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), seconds,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(work);
    return failures == 0 ? 0 : 1;
}
