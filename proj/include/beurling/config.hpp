#pragma once

#include "beurling/density.hpp"
#include "beurling/prime_sampler.hpp"
#include "beurling/sine_polynomial.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace beurling {

// Parse or validation failure; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SineConfig {
    double epsilon = 0.25;
    SearchStrategy strategy = SearchStrategy::smooth;
    std::uint64_t seed = 1;
    std::int64_t budget = 1000000;
    bool operator==(const SineConfig&) const = default;
};

struct InterferenceConfig {
    std::optional<double> v;  // default (4N+5)/epsilon
    double epsilon = 0.2;
    double beta0 = 0.75;
    double x_lo = 1e3;
    double x_hi = 1e7;
    bool operator==(const InterferenceConfig&) const = default;
};

struct OscillationConfig {
    double epsilon = 0.2;
    double Y = 100.0;
    double c = 2.0;
    double m = 2.0;
    bool operator==(const OscillationConfig&) const = default;
};

struct ExperimentConfig {
    double r = 0.6;
    ZeroSpec zeros;
    std::optional<std::int64_t> M;
    SamplerMethod sampler = SamplerMethod::quantile;
    std::uint64_t seed = 1;
    double x_max = 1e7;
    double X_cut = 1e7;
    double grid_ratio = 1.1;
    std::optional<SineConfig> sine;
    std::optional<InterferenceConfig> interference;
    std::optional<OscillationConfig> oscillation;
    std::string output_dir = "out";

    // Range checks that do not need a density; throws ConfigError.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);
// SHA-256 of the canonical serialization, hex encoded.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace beurling
