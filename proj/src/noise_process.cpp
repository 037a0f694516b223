#include "reheat/noise_process.hpp"

#include <cmath>
#include <string>

#include "reheat/errors.hpp"

namespace reheat {

std::string_view to_string(Family family) {
    switch (family) {
        case Family::Ddpm: return "ddpm";
        case Family::Edm: return "edm";
        case Family::Fm: return "fm";
    }
    return "unknown";
}

Family parse_family(std::string_view text) {
    if (text == "ddpm") return Family::Ddpm;
    if (text == "edm") return Family::Edm;
    if (text == "fm") return Family::Fm;
    fail(ErrorCode::Parameter, "unknown family '" + std::string(text) + "'");
}

double AlphaBarBuffer::at(int t) const {
    require(t >= 0 && t < T, ErrorCode::Domain,
            "timestep " + std::to_string(t) + " outside [0, " + std::to_string(T - 1) + "]");
    return alphabar[static_cast<std::size_t>(t)];
}

AlphaBarBuffer build_linear_alphabar(int T, double beta_start, double beta_end) {
    require(T >= 2, ErrorCode::Parameter, "T must be at least 2");
    require(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0, ErrorCode::Parameter,
            "beta range must satisfy 0 < beta_start < beta_end < 1");

    AlphaBarBuffer buffer{T, beta_start, beta_end, {}};
    buffer.alphabar.resize(static_cast<std::size_t>(T));
    const double span = beta_end - beta_start;
    double product = 1.0;
    for (int s = 0; s < T; ++s) {
        const double beta = beta_start + span * static_cast<double>(s) / static_cast<double>(T - 1);
        product *= 1.0 - beta;
        buffer.alphabar[static_cast<std::size_t>(s)] = product;
    }
    return buffer;
}

void EdmRange::validate() const {
    require(sigma_min > 0.0, ErrorCode::Parameter, "sigma_min must be positive");
    require(sigma_max > sigma_min, ErrorCode::Parameter, "sigma_max must exceed sigma_min");
    require(rho > 0.0, ErrorCode::Parameter, "rho must be positive");
}

void FlowRange::validate() const {
    require(t_min > 0.0 && t_min < t_max && t_max < 1.0, ErrorCode::Parameter,
            "flow range must satisfy 0 < t_min < t_max < 1");
}

Family family_of(const Process& process) {
    switch (process.index()) {
        case 0: return Family::Ddpm;
        case 1: return Family::Edm;
        default: return Family::Fm;
    }
}

namespace {

const Process& checked(Family family, const Process& process) {
    require(family_of(process) == family, ErrorCode::Parameter,
            "process parameters do not belong to family " + std::string(to_string(family)));
    return process;
}

}  // namespace

UnifiedLevel sigma_hat(Family family, double coordinate, const Process& process) {
    checked(family, process);
    switch (family) {
        case Family::Ddpm: {
            const auto& buffer = std::get<AlphaBarBuffer>(process);
            require(coordinate == std::floor(coordinate), ErrorCode::Domain, "DDPM timestep must be an integer");
            return {family, std::sqrt(1.0 - buffer.at(static_cast<int>(coordinate)))};
        }
        case Family::Edm: {
            const auto& range = std::get<EdmRange>(process);
            require(coordinate >= 0.0 && coordinate <= range.sigma_max, ErrorCode::Domain,
                    "EDM sigma outside [0, sigma_max]");
            return {family, coordinate};
        }
        case Family::Fm: {
            const auto& range = std::get<FlowRange>(process);
            require(coordinate >= range.t_min && coordinate <= range.t_max, ErrorCode::Domain,
                    "flow time outside [t_min, t_max]");
            return {family, 1.0 - coordinate};
        }
    }
    fail(ErrorCode::Parameter, "unknown family");
}

NoiseLevel noise_level(Family family, double coordinate, const Process& process) {
    const double level = sigma_hat(family, coordinate, process).sigma_hat;
    switch (family) {
        case Family::Ddpm: {
            const double ab = std::get<AlphaBarBuffer>(process).at(static_cast<int>(coordinate));
            return {std::sqrt(ab), level};
        }
        case Family::Edm: return {1.0, level};
        case Family::Fm: return {coordinate, level};
    }
    fail(ErrorCode::Parameter, "unknown family");
}

NoiseLevel noise_level_from_sigma_hat(Family family, double level) {
    require(level >= 0.0, ErrorCode::Domain, "unified noise level must be nonnegative");
    switch (family) {
        case Family::Ddpm:
            require(level <= 1.0, ErrorCode::Domain, "DDPM unified level must lie in [0, 1]");
            return {std::sqrt(1.0 - level * level), level};
        case Family::Edm: return {1.0, level};
        case Family::Fm:
            require(level <= 1.0, ErrorCode::Domain, "FM unified level must lie in [0, 1]");
            return {1.0 - level, level};
    }
    fail(ErrorCode::Parameter, "unknown family");
}

}  // namespace reheat
