// Generalized prime systems realised from a counting function F.
#pragma once

#include "beurling/density.hpp"
#include "beurling/hash.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace beurling {

enum class SamplerMethod : std::uint8_t { quantile = 0, dmv_random = 1 };

std::string to_string(SamplerMethod m);
SamplerMethod parse_sampler_method(const std::string& s);

struct PrimeSystem {
    std::vector<double> primes;
    SamplerMethod method = SamplerMethod::quantile;
    std::uint64_t seed = 0;
    double x_max = 0.0;
    Digest density_fingerprint{};
    std::size_t collisions = 0;  // adjacent values pushed apart by one ulp

    // pi_P(x): number of primes <= x.
    std::size_t count_upto(double x) const;
};

class EmptySystemError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

PrimeSystem sample_primes(const CountingFunction& F, SamplerMethod method, std::uint64_t seed,
                          double x_max);

// Largest |pi_P(x) - F(x)| over jump points (both one-sided limits), the
// midpoints between consecutive primes, and x_max.
double max_count_deviation(const PrimeSystem& ps, const CountingFunction& F);

// J(x,t) = sum_{p <= x} p^{-it} - \int_1^x y^{-it} dF(y).
cplx discrepancy_J(const PrimeSystem& ps, const CountingFunction& F, double x, double t);

struct JConstantReport {
    double C = 0.0;        // max |J| / (sqrt x + sqrt(x log(|t|+1)/log(x+1)))
    double at_x = 0.0;
    double at_t = 0.0;
};

JConstantReport empirical_J_constant(const PrimeSystem& ps, const CountingFunction& F,
                                     const std::vector<double>& xs, const std::vector<double>& ts);

void write_prime_system(const std::string& path, const PrimeSystem& ps);
PrimeSystem read_prime_system(const std::string& path);
std::string prime_system_sidecar(const PrimeSystem& ps);

}  // namespace beurling
