#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reheat/noise_process.hpp"

namespace reheat {

enum class ScheduleKind { Monotonic, SingleReheat, Sawtooth, DampedOsc, Adaptive, Custom };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

struct SingleReheatParams {
    double t_reheat = 0.4;
    double delta = 0.15;
};

struct SawtoothParams {
    int period = 25;
    double delta = 0.08;
};

struct DampedOscParams {
    double amplitude = 0.2;
    double damping = 2.5;
    double frequency = 4.0;
};

using ScheduleParams = std::variant<std::monostate, SingleReheatParams, SawtoothParams, DampedOscParams>;

/// A sampling trajectory of N+1 coordinates: integer timesteps (DDPM),
/// sigmas with a terminal 0 (EDM) or flow times (FM).
struct Schedule {
    Family family = Family::Ddpm;
    ScheduleKind kind = ScheduleKind::Monotonic;
    std::vector<double> values;
    ScheduleParams params;
    Process process;

    int nfe() const { return static_cast<int>(values.size()) - 1; }
    int timestep(int i) const;
    std::vector<double> sigma_hats() const;
};

/// Round half away from zero; the integerisation used for all DDPM schedules.
int round_half_away(double value);

Schedule base_monotonic(const Process& process, int N);
Schedule single_reheat(const Schedule& base, const SingleReheatParams& params = {});
Schedule sawtooth(const Schedule& base, const SawtoothParams& params = {});
Schedule damped_osc(const Process& process, int N, const DampedOscParams& params = {});

/// Arbitrary coordinate sequence, checked against the family invariants.
Schedule custom_schedule(const Process& process, std::vector<double> values,
                         ScheduleKind kind = ScheduleKind::Custom);

/// Builds any non-adaptive kind from its default or supplied parameters.
Schedule make_schedule(const Process& process, ScheduleKind kind, int N, const ScheduleParams& params = {});

/// Throws unless length, endpoint and range invariants hold.
void validate(const Schedule& schedule);

/// R = { i : sigma_hat_{i+1} > sigma_hat_i }.
std::vector<int> reheat_indices(std::span<const double> sigma_hat);
std::vector<int> reheat_indices(const Schedule& schedule);

/// Reheated noise as a fraction of the covered range.
double overhead(std::span<const double> sigma_hat);
double overhead(const Schedule& schedule);

/// CSV with header index,coordinate,sigma_hat,is_reheat. is_reheat marks
/// rows whose outgoing transition raises the noise level.
std::string to_csv(const Schedule& schedule);

}  // namespace reheat
