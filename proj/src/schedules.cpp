#include "reheat/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>

#include "reheat/errors.hpp"

namespace reheat {

std::string_view to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Monotonic: return "monotonic";
        case ScheduleKind::SingleReheat: return "single_reheat";
        case ScheduleKind::Sawtooth: return "sawtooth";
        case ScheduleKind::DampedOsc: return "damped_osc";
        case ScheduleKind::Adaptive: return "adaptive";
        case ScheduleKind::Custom: return "custom";
    }
    return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
    for (auto kind : {ScheduleKind::Monotonic, ScheduleKind::SingleReheat, ScheduleKind::Sawtooth,
                      ScheduleKind::DampedOsc, ScheduleKind::Adaptive, ScheduleKind::Custom}) {
        if (to_string(kind) == text) return kind;
    }
    fail(ErrorCode::Parameter, "unknown schedule kind '" + std::string(text) + "'");
}

int round_half_away(double value) { return static_cast<int>(std::round(value)); }

int Schedule::timestep(int i) const {
    require(family == Family::Ddpm, ErrorCode::Parameter, "timesteps exist only for DDPM schedules");
    return static_cast<int>(values.at(static_cast<std::size_t>(i)));
}

std::vector<double> Schedule::sigma_hats() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(sigma_hat(family, v, process).sigma_hat);
    return out;
}

namespace {

int train_steps(const Schedule& s) { return std::get<AlphaBarBuffer>(s.process).T; }

int reheat_position(double t_reheat, int N) {
    const int raw = static_cast<int>(std::floor(t_reheat * N));
    return std::clamp(raw, 2, N - 3);
}

// sin(2 pi x) with the argument reduced to one period first, so integer
// cycle counts give an exact zero.
double sin_cycles(double cycles) {
    const double frac = cycles - std::floor(cycles);
    return std::sin(2.0 * std::numbers::pi * frac);
}

double damped_wave(const DampedOscParams& p, double s) {
    return p.amplitude * std::exp(-p.damping * s) * sin_cycles(p.frequency * s);
}

void require_monotonic_base(const Schedule& base) {
    require(base.kind == ScheduleKind::Monotonic, ErrorCode::Parameter,
            "base schedule must be monotonic");
    require(base.nfe() >= 5, ErrorCode::Parameter, "schedule needs N >= 5");
}

}  // namespace

Schedule base_monotonic(const Process& process, int N) {
    require(N >= 2, ErrorCode::Parameter, "N must be at least 2");
    Schedule s;
    s.family = family_of(process);
    s.kind = ScheduleKind::Monotonic;
    s.process = process;
    s.values.resize(static_cast<std::size_t>(N) + 1);

    switch (s.family) {
        case Family::Ddpm: {
            const long last = train_steps(s) - 1;
            for (int i = 0; i <= N; ++i) {
                // round((T-1)(N-i)/N) in exact integer arithmetic
                const long num = last * (N - i);
                s.values[static_cast<std::size_t>(i)] = static_cast<double>((2 * num + N) / (2L * N));
            }
            s.values.front() = static_cast<double>(last);
            s.values.back() = 0.0;
            break;
        }
        case Family::Edm: {
            const auto& r = std::get<EdmRange>(process);
            r.validate();
            const double hi = std::pow(r.sigma_max, 1.0 / r.rho);
            const double lo = std::pow(r.sigma_min, 1.0 / r.rho);
            for (int i = 0; i < N; ++i) {
                const double frac = static_cast<double>(i) / static_cast<double>(N - 1);
                s.values[static_cast<std::size_t>(i)] = std::pow(hi + frac * (lo - hi), r.rho);
            }
            s.values.front() = r.sigma_max;
            s.values[static_cast<std::size_t>(N) - 1] = r.sigma_min;
            s.values.back() = 0.0;
            break;
        }
        case Family::Fm: {
            const auto& r = std::get<FlowRange>(process);
            r.validate();
            for (int i = 0; i <= N; ++i) {
                s.values[static_cast<std::size_t>(i)] =
                    r.t_min + (static_cast<double>(i) / N) * (r.t_max - r.t_min);
            }
            s.values.front() = r.t_min;
            s.values.back() = r.t_max;
            break;
        }
    }
    return s;
}

Schedule single_reheat(const Schedule& base, const SingleReheatParams& params) {
    require_monotonic_base(base);
    require(params.delta > 0.0, ErrorCode::Parameter, "single-reheat delta must be positive");
    require(params.t_reheat > 0.0 && params.t_reheat < 1.0, ErrorCode::Parameter,
            "t_reheat must lie in (0, 1)");

    const int N = base.nfe();
    const int r = reheat_position(params.t_reheat, N);
    Schedule s = base;
    s.kind = ScheduleKind::SingleReheat;
    s.params = params;

    switch (base.family) {
        case Family::Ddpm: {
            const int last = train_steps(base) - 1;
            const int tau_r = base.timestep(r);
            const int jump = std::max(static_cast<int>(std::floor(tau_r * params.delta)), 1);
            const int peak = std::min(tau_r + jump, last);
            s.values[static_cast<std::size_t>(r)] = peak;
            // linspace(peak, 0, N - r + 1) without its first element
            const int tail = N - r;
            for (int j = 1; j <= tail; ++j) {
                const double v = peak * (1.0 - static_cast<double>(j) / tail);
                s.values[static_cast<std::size_t>(r + j)] = round_half_away(v);
            }
            s.values.back() = 0.0;
            break;
        }
        case Family::Edm: {
            const int lookback = std::max(1, static_cast<int>(std::floor(N * params.delta / 2.0)));
            s.values[static_cast<std::size_t>(r)] = base.values[static_cast<std::size_t>(std::max(0, r - lookback))];
            break;
        }
        case Family::Fm: {
            const auto& range = std::get<FlowRange>(base.process);
            const double t = base.values[static_cast<std::size_t>(r)];
            s.values[static_cast<std::size_t>(r)] = std::max(t - params.delta * t, range.t_min);
            break;
        }
    }
    validate(s);
    return s;
}

Schedule sawtooth(const Schedule& base, const SawtoothParams& params) {
    require_monotonic_base(base);
    require(params.period >= 2, ErrorCode::Parameter, "sawtooth period must be at least 2");
    require(params.delta > 0.0, ErrorCode::Parameter, "sawtooth delta must be positive");
    require(base.family != Family::Fm, ErrorCode::Unsupported,
            "sawtooth is not defined in flow-matching time");

    const int N = base.nfe();
    Schedule s = base;
    s.kind = ScheduleKind::Sawtooth;
    s.params = params;

    for (int i = params.period; i < N - 2; i += params.period) {
        const auto idx = static_cast<std::size_t>(i);
        if (base.family == Family::Ddpm) {
            const int tau = base.timestep(i);
            if (tau < 5) continue;
            const int jump = std::max(static_cast<int>(std::floor(tau * params.delta)), 1);
            s.values[idx] = std::min(tau + jump, train_steps(base) - 1);
        } else {
            const int lookback = static_cast<int>(std::ceil(N * params.delta / 2.0));
            s.values[idx] = base.values[static_cast<std::size_t>(std::max(0, i - lookback))];
        }
    }
    validate(s);
    return s;
}

Schedule damped_osc(const Process& process, int N, const DampedOscParams& params) {
    require(params.amplitude >= 0.0 && params.damping >= 0.0 && params.frequency > 0.0, ErrorCode::Parameter,
            "damped oscillation needs A >= 0, gamma >= 0, f > 0");
    require(N >= 5, ErrorCode::Parameter, "reheating schedules need N >= 5");
    Schedule s = base_monotonic(process, N);
    s.kind = ScheduleKind::DampedOsc;
    s.params = params;

    switch (s.family) {
        case Family::Ddpm: {
            const int T = std::get<AlphaBarBuffer>(process).T;
            const double last = T - 1;
            for (int i = 0; i <= N; ++i) {
                const double u = static_cast<double>(i) / N;
                const double linear = last * static_cast<double>(N - i) / N;
                const double v = std::clamp(linear + last * damped_wave(params, u), 0.0, last);
                s.values[static_cast<std::size_t>(i)] = round_half_away(v);
            }
            s.values.front() = last;
            s.values.back() = 0.0;
            break;
        }
        case Family::Edm: {
            const auto& r = std::get<EdmRange>(process);
            const double lo = std::log(r.sigma_min);
            const double hi = std::log(r.sigma_max);
            for (int i = 0; i < N; ++i) {
                const double u = static_cast<double>(i) / N;
                const double log_sigma = std::log(s.values[static_cast<std::size_t>(i)]);
                const double perturbed = log_sigma + std::abs(log_sigma) * damped_wave(params, u);
                s.values[static_cast<std::size_t>(i)] = std::exp(std::clamp(perturbed, lo, hi));
            }
            s.values.back() = 0.0;
            break;
        }
        case Family::Fm: {
            const auto& r = std::get<FlowRange>(process);
            const double scale = 0.3 * (r.t_max - r.t_min);
            for (int i = 0; i <= N; ++i) {
                const double u = static_cast<double>(i) / N;
                const double t = s.values[static_cast<std::size_t>(i)] + scale * damped_wave(params, u);
                s.values[static_cast<std::size_t>(i)] = std::clamp(t, r.t_min, r.t_max);
            }
            s.values.front() = r.t_min;
            s.values.back() = r.t_max;
            break;
        }
    }
    validate(s);
    return s;
}

Schedule custom_schedule(const Process& process, std::vector<double> values, ScheduleKind kind) {
    Schedule s;
    s.family = family_of(process);
    s.kind = kind;
    s.process = process;
    s.values = std::move(values);
    validate(s);
    return s;
}

Schedule make_schedule(const Process& process, ScheduleKind kind, int N, const ScheduleParams& params) {
    switch (kind) {
        case ScheduleKind::Monotonic: return base_monotonic(process, N);
        case ScheduleKind::SingleReheat: {
            const auto* p = std::get_if<SingleReheatParams>(&params);
            return single_reheat(base_monotonic(process, N), p ? *p : SingleReheatParams{});
        }
        case ScheduleKind::Sawtooth: {
            const auto* p = std::get_if<SawtoothParams>(&params);
            return sawtooth(base_monotonic(process, N), p ? *p : SawtoothParams{});
        }
        case ScheduleKind::DampedOsc: {
            const auto* p = std::get_if<DampedOscParams>(&params);
            return damped_osc(process, N, p ? *p : DampedOscParams{});
        }
        case ScheduleKind::Adaptive:
            fail(ErrorCode::Unsupported, "adaptive schedules are realised online by the sampler");
        case ScheduleKind::Custom:
            fail(ErrorCode::Unsupported, "custom schedules need explicit values");
    }
    fail(ErrorCode::Parameter, "unknown schedule kind");
}

void validate(const Schedule& s) {
    const int N = s.nfe();
    require(N >= 1, ErrorCode::Parameter, "schedule needs at least two entries");
    require(family_of(s.process) == s.family, ErrorCode::Parameter, "schedule family and process disagree");

    switch (s.family) {
        case Family::Ddpm: {
            const int last = train_steps(s) - 1;
            for (double v : s.values) {
                require(v == std::floor(v) && v >= 0 && v <= last, ErrorCode::Parameter,
                        "DDPM schedule entries must be integers in [0, T-1]");
            }
            require(s.values.front() == last && s.values.back() == 0.0, ErrorCode::Parameter,
                    "DDPM schedule must run from T-1 to 0");
            break;
        }
        case Family::Edm: {
            const auto& r = std::get<EdmRange>(s.process);
            require(std::abs(s.values.front() - r.sigma_max) <= 1e-9 * r.sigma_max, ErrorCode::Parameter,
                    "EDM schedule must start at sigma_max");
            require(s.values.back() == 0.0, ErrorCode::Parameter, "EDM schedule must end at 0");
            for (int i = 0; i < N; ++i) {
                const double v = s.values[static_cast<std::size_t>(i)];
                require(v >= r.sigma_min * (1 - 1e-12) && v <= r.sigma_max * (1 + 1e-12), ErrorCode::Parameter,
                        "EDM schedule entries must lie in [sigma_min, sigma_max]");
            }
            break;
        }
        case Family::Fm: {
            const auto& r = std::get<FlowRange>(s.process);
            require(s.values.front() == r.t_min && s.values.back() == r.t_max, ErrorCode::Parameter,
                    "FM schedule must run from t_min to t_max");
            for (double v : s.values) {
                require(v >= r.t_min && v <= r.t_max, ErrorCode::Parameter,
                        "FM schedule entries must lie in [t_min, t_max]");
            }
            break;
        }
    }
}

std::vector<int> reheat_indices(std::span<const double> level) {
    std::vector<int> out;
    for (std::size_t i = 0; i + 1 < level.size(); ++i) {
        if (level[i + 1] > level[i]) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> reheat_indices(const Schedule& s) {
    std::vector<int> out;
    const auto& v = s.values;
    // The EDM terminal sigma = 0 never follows an evaluation it could reheat.
    const std::size_t transitions = s.family == Family::Edm ? v.size() - 2 : v.size() - 1;
    for (std::size_t i = 0; i < transitions; ++i) {
        const bool up = s.family == Family::Fm ? v[i + 1] < v[i] : v[i + 1] > v[i];
        if (up) out.push_back(static_cast<int>(i));
    }
    return out;
}

double overhead(std::span<const double> level) {
    require(level.size() >= 2, ErrorCode::Domain, "overhead needs at least two levels");
    const double range = level.front() - level.back();
    require(range > 0.0, ErrorCode::Domain, "overhead undefined when sigma_hat_0 <= sigma_hat_N");
    double climbed = 0.0;
    for (int i : reheat_indices(level)) {
        climbed += level[static_cast<std::size_t>(i) + 1] - level[static_cast<std::size_t>(i)];
    }
    return climbed / range;
}

double overhead(const Schedule& s) {
    const auto level = s.sigma_hats();
    return overhead(std::span<const double>(level));
}

std::string to_csv(const Schedule& s) {
    const auto level = s.sigma_hats();
    std::vector<char> flag(s.values.size(), 0);
    for (int i : reheat_indices(s)) flag[static_cast<std::size_t>(i)] = 1;

    std::string out = "index,coordinate,sigma_hat,is_reheat\n";
    char line[128];
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.family == Family::Ddpm) {
            std::snprintf(line, sizeof line, "%zu,%d,%.17g,%d\n", i, static_cast<int>(s.values[i]), level[i], flag[i]);
        } else {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%d\n", i, s.values[i], level[i], flag[i]);
        }
        out += line;
    }
    return out;
}

}  // namespace reheat
