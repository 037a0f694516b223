#pragma once

#include <string_view>
#include <variant>
#include <vector>

namespace reheat {

enum class Family { Ddpm, Edm, Fm };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

/// Cumulative signal fractions of a discrete VP forward process.
/// alphabar[t] = prod_{s<=t} (1 - beta_s), beta linear in s.
struct AlphaBarBuffer {
    int T = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;
    std::vector<double> alphabar;

    double at(int t) const;
};

AlphaBarBuffer build_linear_alphabar(int T = 1000, double beta_start = 1e-4, double beta_end = 0.02);

/// Karras sigma range of a variance-exploding process.
struct EdmRange {
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;

    void validate() const;
};

/// Time window of the linear noise-to-data interpolation x_t = (1-t) eps + t x0.
struct FlowRange {
    double t_min = 0.001;
    double t_max = 0.999;

    void validate() const;
};

using Process = std::variant<AlphaBarBuffer, EdmRange, FlowRange>;

Family family_of(const Process& process);

/// x = signal * x0 + noise * eps. In all three parameterisations the unified
/// noise level equals the noise coefficient.
struct NoiseLevel {
    double signal = 1.0;
    double noise = 0.0;

    double sigma_hat() const { return noise; }
};

struct UnifiedLevel {
    Family family;
    double sigma_hat;
};

/// Maps a schedule coordinate (timestep, sigma or t) to the unified level.
UnifiedLevel sigma_hat(Family family, double coordinate, const Process& process);

/// Forward-process coefficients at a schedule coordinate.
NoiseLevel noise_level(Family family, double coordinate, const Process& process);

/// Forward-process coefficients for a continuous unified level; DDPM uses
/// alphabar = 1 - sigma_hat^2.
NoiseLevel noise_level_from_sigma_hat(Family family, double sigma_hat);

}  // namespace reheat
