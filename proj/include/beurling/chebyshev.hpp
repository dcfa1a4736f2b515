// Chebyshev-type summatory functions over a generalized prime system.
#pragma once

#include "beurling/density.hpp"
#include "beurling/prime_sampler.hpp"
#include "beurling/semigroup.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace beurling {

// Sorted prime-power jumps with cumulative psi, theta and Pi.
class ChebyshevIndex {
public:
    ChebyshevIndex(std::vector<double> primes, double x_max);
    explicit ChebyshevIndex(const PrimeSystem& ps) : ChebyshevIndex(ps.primes, ps.x_max) {}

    double x_max() const { return x_max_; }
    const std::vector<double>& primes() const { return primes_; }

    std::size_t pi(double x) const;
    double theta(double x) const;
    double psi(double x) const;
    double Pi(double x) const;
    // Independent route: sum_{n <= log x / log p_1} theta(x^{1/n}).
    double psi_via_theta(double x) const;

    // Jump positions (ascending, possibly repeated) and psi just after each.
    const std::vector<double>& jump_x() const { return jump_x_; }
    const std::vector<double>& psi_after() const { return psi_after_; }

private:
    void check(double x) const;

    std::vector<double> primes_;
    std::vector<double> theta_prefix_;  // theta after each prime
    double x_max_;
    std::vector<double> jump_x_;
    std::vector<double> psi_after_;
    std::vector<double> Pi_after_;
};

// psi model used by the oscillation measurements. Beyond the prime list a
// quantile system can be continued with the smooth density it was drawn from.
class PsiModel {
public:
    virtual ~PsiModel() = default;
    // Largest x at which psi is available.
    virtual double max_x() const = 0;
    virtual double psi(double x) const = 0;
    // Jumps of psi inside [a, b] (x, psi after jump), ascending; only where the
    // model is a step function.
    virtual void jumps(double a, double b, std::vector<std::pair<double, double>>& out) const = 0;
    // Upper end of the step-function part of the model.
    virtual double step_limit() const = 0;

    // Stieltjes data of Delta = psi - x in u = log x: Delta(1), point masses,
    // and the density of the continuous part (including the -e^u of -x).
    virtual cplx delta_at_one() const { return -1.0; }
    virtual void atoms(double u_lo, double u_hi, const std::function<void(double, double)>& cb) const = 0;
    virtual cplx smooth_delta_density(double u) const = 0;
    // u up to which the Stieltjes data are complete.
    virtual double measure_limit_u() const = 0;
    // Largest angular frequency (in u) present in the smooth density.
    virtual double oscillation_scale() const { return 0.0; }
};

class SystemPsiModel : public PsiModel {
public:
    // `extension` (quantile systems only) continues psi beyond x_max.
    SystemPsiModel(const PrimeSystem& ps, const TargetDensity* extension = nullptr);

    double max_x() const override;
    double psi(double x) const override;
    void jumps(double a, double b, std::vector<std::pair<double, double>>& out) const override;
    double step_limit() const override { return index_.x_max(); }
    void atoms(double u_lo, double u_hi, const std::function<void(double, double)>& cb) const override;
    cplx smooth_delta_density(double u) const override;
    double measure_limit_u() const override;
    double oscillation_scale() const override { return ext_ ? ext_->zeros().max_gamma() : 0.0; }

    const ChebyshevIndex& index() const { return index_; }
    bool extended() const { return ext_ != nullptr; }
    // Start of the smooth continuation in u (level = number of listed primes).
    double extension_start_u() const { return u0_; }

private:
    double theta_beyond_log(double v) const;

    ChebyshevIndex index_;
    std::vector<double> log_p_;
    const TargetDensity* ext_;
    double u0_ = std::numeric_limits<double>::infinity();
    double T0_ = 0.0;
};

struct SummaryTables {
    std::vector<double> grid;
    std::vector<std::optional<std::uint64_t>> N;
    std::vector<double> psi, theta, Pi, Delta;
    std::optional<AxiomFit> fit;
};

// Grid must lie in (1, x_max]. N and the fit are filled in separately.
SummaryTables chebyshev_tables(const PrimeSystem& ps, const std::vector<double>& grid);

void attach_counts(SummaryTables& t, const IntegerCounts& counts);

// CSV with columns x,N,psi,theta,Pi,Delta (17 significant digits).
std::string tables_csv(const SummaryTables& t);

}  // namespace beurling
