// Target prime-counting density: f0 and the smoothed, nondecreasing F.
#pragma once

#include "beurling/quadrature.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace beurling {

struct Zero {
    double beta = 0.0;
    double gamma = 0.0;  // stored nonnegative; the conjugate is implied when gamma > 0
    int mult = 1;

    bool operator==(const Zero&) const = default;
};

class ZeroSpec {
public:
    ZeroSpec() = default;
    explicit ZeroSpec(std::vector<Zero> zeros);

    const std::vector<Zero>& entries() const { return zeros_; }
    bool empty() const { return zeros_.empty(); }

    // Total multiplicity over the conjugate-closed multiset.
    std::int64_t expanded_count() const;
    double max_beta() const;
    double max_gamma() const;

    // Every zero of the expanded multiset, repeated by multiplicity.
    std::vector<cplx> expanded() const;

    bool operator==(const ZeroSpec&) const = default;

private:
    std::vector<Zero> zeros_;
};

// ceil(2 N^{1/(2(1-B))}); 1 for the empty spec.
std::int64_t m_min(const ZeroSpec& zeros);

// Smallest integer M >= 1 with 1 + x^{r-1} + M x^{-1/2} - sum x^{rho-1} >= 0 on [1, inf).
std::int64_t m_sharp(double r, const ZeroSpec& zeros);

// Counting function interface used by the sampler and the discrepancy estimate.
class CountingFunction {
public:
    virtual ~CountingFunction() = default;
    virtual double value(double x) const = 0;
    // inf{x >= 1 : value(x) >= level}
    virtual double inverse(double level) const = 0;
    // \int_1^x y^{-it} dF(y)
    virtual cplx oscillatory_integral(double x, double t) const = 0;
    virtual std::string fingerprint_source() const = 0;
};

class TargetDensity : public CountingFunction {
public:
    // M defaults to m_min(zeros). Validation requires r in [1/2,1), every
    // beta in (max(r,1/2), 1) and M >= m_sharp; `unsafe` skips the M check.
    TargetDensity(double r, ZeroSpec zeros, std::optional<std::int64_t> M = std::nullopt,
                  bool unsafe = false);
    TargetDensity(const TargetDensity& other);
    TargetDensity& operator=(const TargetDensity&) = delete;

    double r() const { return r_; }
    std::int64_t M() const { return M_; }
    bool unsafe() const { return unsafe_; }
    const ZeroSpec& zeros() const { return zeros_; }

    double f0(double x) const;
    double f0_prime(double x) const;
    // f0'(e^u) - 1, evaluated without cancellation.
    double f0_prime_excess_log(double u) const;
    // dF/du at u = log y; equals expm1(u)/u * f0'(e^u).
    double dF_du(double u) const;

    double F(double x) const;
    // F as a function of u = log x.
    double F_log(double u) const;
    // \int_0^u v dF(e^v) dv = \int_1^{e^u} log y dF(y).
    double theta_smooth_log(double u) const;

    double value(double x) const override { return F(x); }
    double inverse(double level) const override;
    // Inverse in the log variable: smallest u with F_log(u) >= level.
    double inverse_log(double level) const;
    cplx oscillatory_integral(double x, double t) const override;
    cplx oscillatory_integral_log(double u, double t) const;
    std::string fingerprint_source() const override;

    // max F(x) log x / x over a log-grid on [x_lo, x_hi].
    double chebyshev_constant(double x_lo, double x_hi, int points) const;

    // Panel width in u used by the cache.
    double panel_width() const { return panel_; }

private:
    struct Cache {
        std::vector<double> node;   // u values, node[0] = 0
        std::vector<double> cumF;   // F at nodes
        std::vector<double> cumT;   // \int v dF at nodes
        CompensatedSum<double> accF, accT;
    };

    void validate() const;
    void ensure(double u) const;
    // Locates the cache interval containing u: returns (u_k, u_{k+1}, F_k, T_k).
    void locate(double u, double& a, double& b, double& Fa, double& Ta) const;

    double r_;
    ZeroSpec zeros_;
    std::int64_t M_;
    bool unsafe_;
    double panel_;
    std::vector<cplx> expanded_;
    struct Term {
        double beta, gamma, weight;  // weight = mult (x2 for conjugate pairs)
        double abs_rho, arg_rho;
    };
    std::vector<Term> terms_;

    mutable std::shared_mutex mutex_;
    mutable Cache cache_;
};

}  // namespace beurling
