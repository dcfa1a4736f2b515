// Oscillation of Delta(x) = psi(x) - x: residual against the zero sum, the
// sup statistic K, the weighted integral U and its residue-side value.
#pragma once

#include "beurling/chebyshev.hpp"
#include "beurling/density.hpp"
#include "beurling/sine_polynomial.hpp"

#include <string>
#include <vector>

namespace beurling {

class RangeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// sum_{rho in S} x^rho / rho, conjugate pairs combined into real cosines.
double zero_sum(const ZeroSpec& zeros, double x);

struct RvmPoint {
    double x = 0.0;
    double delta = 0.0;
    double residual = 0.0;  // Delta + sum x^rho/rho
};

struct RvmResult {
    std::vector<RvmPoint> points;
    double max_over_sqrt = 0.0;
};

RvmResult rvm_residual(const PsiModel& model, const ZeroSpec& zeros, const std::vector<double>& grid);

struct RvmDecade {
    double lo = 0.0, hi = 0.0;
    double max_over_sqrt = 0.0;     // max |Delta + sum x^rho/rho| / sqrt x
    double corrected_over_sqrt = 0.0;  // max |psi - f0| / sqrt x
};

// Decade-wise maxima over [lo, hi] using every jump (both one-sided limits) of
// the step part of the model.
std::vector<RvmDecade> rvm_decade_scan(const PsiModel& model, const TargetDensity& d, double lo, double hi);

struct KSupResult {
    double K = 0.0;
    double argmax = 0.0;
    bool left_limit = false;  // supremum approached from the left of a jump
};

// sup |Delta(x)| / x^beta0 over [a, b]. Exact on the step part of the model;
// grid with local refinement beyond it.
KSupResult k_sup(const PsiModel& model, double beta0, double a, double b, double grid_ratio,
                 double max_gamma);

inline double max_grid_ratio(double max_gamma) {
    return max_gamma > 0.0 ? 1.0 + 3.14159265358979323846 / (8.0 * max_gamma) : 2.0;
}

struct UResult {
    cplx value;
    double quad_error = 0.0;
    double tail_bound = 0.0;  // crude bound on a truncated range, 0 when complete
};

// U(w) with M = 16m. Throws RangeError when the model does not reach e^{28m}
// unless `crude_tail` is set.
UResult u_weighted(const PsiModel& model, cplx w, double m, bool crude_tail = false);

UResult s_pair(const PsiModel& model, cplx rho0, double m, bool crude_tail = false);

struct ResidueSide {
    cplx zero_terms;  // -mult * exp(m(rho-w)^2 + M(rho-w)) summed over S and w in {rho0, conj rho0}
    cplx pole_terms;  // poles at r and 1/2 plus the constant part of -s/(s-1)
    cplx with_poles() const { return zero_terms + pole_terms; }
    cplx without_poles() const { return zero_terms; }
};

ResidueSide residue_side(const TargetDensity& d, cplx rho0, double m);

struct OscillationReport {
    double x_lo = 0.0, x_hi = 0.0;
    double K = 0.0;
    double K_argmax = 0.0;
    double bound_lower = 0.0;  // (pi/2 - eps) / |rho0|
    double bound_upper = 0.0;  // (pi/2 + 3 eps) / |rho0|
    double rvm_residual_max_over_sqrt = 0.0;
    bool truncated = false;
    bool pass = false;
    std::string note;
};

OscillationReport verify_lower_oscillation(const PsiModel& model, const TargetDensity& d, cplx rho0,
                                           double epsilon, double Y, double c = 2.0);

struct InterferenceReport {
    OscillationReport base;
    double measured = 0.0;     // sup |Delta| |rho0| / x^beta0
    double bound = 0.0;        // pi/2 + 3 eps
    double allowance = 0.0;    // rvm allowance at x_lo
    // Informational: same sup with x^r/r + 2M sqrt(x) removed from Delta (jump endpoints only).
    double measured_corrected = 0.0;
    bool pass_strict = false;  // measured <= bound
    bool pass_with_allowance = false;
};

// Zero layout rho_k = beta0 + i (2 n_k + 1) v for a sine polynomial.
ZeroSpec interference_layout(const SinePolynomial& sine, double v, double beta0);

InterferenceReport verify_interference(const PsiModel& model, const TargetDensity& d,
                                       const SinePolynomial& sine, double v, double beta0, double epsilon,
                                       double x_lo, double x_hi);

// CSV rows x,delta,delta_norm,rvm_residual on a geometric grid over [lo, hi].
std::string oscillation_csv(const PsiModel& model, const ZeroSpec& zeros, double beta0, double rho0_abs,
                            double lo, double hi, double ratio);

std::string summary_text(const OscillationReport& r);

}  // namespace beurling
