// Auxiliary analytic kernels: the Gaussian vertical-line integral, three
// elementary estimates, and the modified Cassels power-sum maximum.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace beurling {

using cplx = std::complex<double>;

// (1/(2 sqrt(pi a))) exp(-b^2/(4a)); the value of
// (1/(2 pi i)) \int_{(c)} exp(a s^2 + b s) ds for any abscissa c.
cplx gaussian_line_integral(double a, cplx b);

// Direct numerical evaluation of the same line integral along Re s = c.
cplx gaussian_line_integral_numeric(double a, cplx b, double c);

enum class EstimateItem { gaussian_tail, log_power, cosine_mean };

struct EstimatePoint {
    EstimateItem item;
    double p1 = 0.0;  // B, x or P
    double p2 = 0.0;  // -, lambda or R
    double p3 = 0.0;  // -, alpha or -
    bool in_domain = false;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct EstimateReport {
    std::vector<EstimatePoint> points;
    std::size_t flagged = 0;
    bool overall = true;
};

// Each grid value is used as B in (i), as x in (ii) (with lambda in {1,2,3},
// alpha in {1/4,1/2,3/4}) and as P in (iii) (with R in {0,1}).
EstimateReport verify_estimate_bounds(const std::vector<double>& sample_grid);

struct PowerSumInstance {
    int k = 0;
    std::vector<cplx> pairs;  // conjugates implied
    double H = 1.0;
};

struct CasselsResult {
    double value = 0.0;
    double argmax_L = 0.0;
};

// Real part of the power sum at exponent L.
double power_sum_re(const PowerSumInstance& inst, double L);

CasselsResult cassels_max(const PowerSumInstance& inst, int grid_density);

// Seeded random instance with k<=4, pairs<=6, r in [0.2,1], alpha in [-pi,pi],
// H in [0.5,10].
PowerSumInstance random_power_sum_instance(std::uint64_t seed);

}  // namespace beurling
