// Beurling zeta function of a prime system and its analytic companions.
#pragma once

#include "beurling/chebyshev.hpp"
#include "beurling/density.hpp"
#include "beurling/prime_sampler.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace beurling {

enum class TailPolicy { reject, estimate };

class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Upper bound for sum_{p > X} p^{-sigma} (log p)^k over the primes beyond the
// truncation.
using PrimeTailBound = std::function<double(double X, double sigma, int k)>;

// Bound built from a target density: \int_X^oo y^{-sigma} log^k y dF + 4 X^{-sigma} log^k X.
PrimeTailBound density_tail_bound(const TargetDensity& d);

// \int_{log X}^oo e^{-s u} u^k dF(e^u) du; `remainder` receives the bound on the
// analytically estimated far tail.
cplx density_mellin_tail(const TargetDensity& d, double X, cplx s, int k, double* remainder = nullptr);

struct ZetaValue {
    cplx value;
    double tail_bound = 0.0;
};

class ZetaContext {
public:
    ZetaContext(const PrimeSystem& ps, const TargetDensity* d, double X_cut, TailPolicy policy,
                double margin = 0.05, double max_tail = 1e-2);
    // Explicit tail model (e.g. for a fixture of rational primes).
    ZetaContext(const PrimeSystem& ps, PrimeTailBound tail, double X_cut, TailPolicy policy,
                double margin = 0.05, double max_tail = 1e-2);

    double X_cut() const { return X_cut_; }
    TailPolicy policy() const { return policy_; }
    const TargetDensity* density() const { return d_; }

    // log zeta as sum -Log(1 - p^{-s}); tail_bound bounds |log zeta - value|.
    ZetaValue log_zeta(cplx s) const;
    ZetaValue zeta_euler(cplx s) const;
    // log zeta continued along the horizontal path from Re s with step dt.
    cplx log_zeta_tracked(cplx s, double dt = 0.1) const;
    cplx zeta_dirichlet(cplx s, double X) const;
    // Rigorous bound on sum_{|g| > X} |g|^{-sigma}.
    double dirichlet_tail(double sigma, double X) const;
    ZetaValue log_deriv(cplx s) const;
    ZetaValue d_function(cplx s) const;
    // s \int_1^{X_cut} Delta(x) x^{-s-1} dx (exact on the step structure) with a
    // bound on the distance to D(s).
    ZetaValue d_function_quadrature(cplx s) const;
    // log zeta - L(s) - L(2s)/2; the estimate policy adds the F-tail of the
    // prime sum beyond X_cut.
    cplx rstar_empirical(cplx s) const;

private:
    void check_region(cplx s, const char* op) const;
    double euler_tail(double sigma, int k) const;

    std::vector<double> primes_;  // primes <= X_cut
    std::vector<double> logs_;
    const TargetDensity* d_ = nullptr;
    PrimeTailBound tail_;
    double X_cut_;
    TailPolicy policy_;
    double margin_;
    double max_tail_;
    std::unique_ptr<ChebyshevIndex> index_;
};

// sigma/(sigma-1/2) + sigma sqrt(log(|t|+2))/sqrt(sigma-1/2)
double rstar_shape(cplx s);

cplx mellin_I(cplx z, cplx s);
cplx mellin_L(const TargetDensity& d, cplx s);
cplx q_eval(const TargetDensity& d, cplx s);

double zero_count_bound(double b, double T, double A_plus_kappa, double theta);
std::int64_t zero_count(const ZeroSpec& zeros, double b, double T);

}  // namespace beurling
