#include "beurling/chebyshev.hpp"

#include "beurling/hash.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace beurling {

ChebyshevIndex::ChebyshevIndex(std::vector<double> primes, double x_max)
    : primes_(std::move(primes)), x_max_(x_max) {
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        if (!(primes_[i] > 1.0)) throw std::invalid_argument("ChebyshevIndex: primes must exceed 1");
        if (i && primes_[i] < primes_[i - 1]) throw std::invalid_argument("ChebyshevIndex: primes unsorted");
    }
    theta_prefix_.resize(primes_.size());
    CompensatedSum<double> th;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        th.add(std::log(primes_[i]));
        theta_prefix_[i] = th.value();
    }
    struct Jump {
        double x, lp, w;
    };
    std::vector<Jump> jumps;
    for (double p : primes_) {
        if (p > x_max_) break;
        const double lp = std::log(p);
        double q = p;
        for (int k = 1; q <= x_max_; ++k) {
            jumps.push_back({q, lp, 1.0 / k});
            q *= p;
        }
    }
    std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.x < b.x; });
    jump_x_.resize(jumps.size());
    psi_after_.resize(jumps.size());
    Pi_after_.resize(jumps.size());
    CompensatedSum<double> ps, pi;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        ps.add(jumps[i].lp);
        pi.add(jumps[i].w);
        jump_x_[i] = jumps[i].x;
        psi_after_[i] = ps.value();
        Pi_after_[i] = pi.value();
    }
}

void ChebyshevIndex::check(double x) const {
    if (!(x <= x_max_)) throw std::domain_error("Chebyshev functions: x beyond x_max (primes unknown there)");
}

std::size_t ChebyshevIndex::pi(double x) const {
    return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

double ChebyshevIndex::theta(double x) const {
    check(x);
    const std::size_t k = pi(x);
    return k ? theta_prefix_[k - 1] : 0.0;
}

double ChebyshevIndex::psi(double x) const {
    check(x);
    const auto k = std::upper_bound(jump_x_.begin(), jump_x_.end(), x) - jump_x_.begin();
    return k ? psi_after_[k - 1] : 0.0;
}

double ChebyshevIndex::Pi(double x) const {
    check(x);
    const auto k = std::upper_bound(jump_x_.begin(), jump_x_.end(), x) - jump_x_.begin();
    return k ? Pi_after_[k - 1] : 0.0;
}

double ChebyshevIndex::psi_via_theta(double x) const {
    check(x);
    if (primes_.empty() || x < primes_.front()) return 0.0;
    const double nmax = std::floor(std::log(x) / std::log(primes_.front()));
    CompensatedSum<double> s;
    for (double n = 1; n <= nmax; n += 1.0) s.add(theta(std::pow(x, 1.0 / n)));
    return s.value();
}

SystemPsiModel::SystemPsiModel(const PrimeSystem& ps, const TargetDensity* extension)
    : index_(ps), ext_(extension) {
    log_p_.reserve(ps.primes.size());
    for (double p : ps.primes) log_p_.push_back(std::log(p));
    if (ext_) {
        if (ps.method != SamplerMethod::quantile)
            throw std::invalid_argument("SystemPsiModel: only quantile systems can be extended");
        u0_ = ext_->inverse_log(static_cast<double>(ps.primes.size()));
        T0_ = ext_->theta_smooth_log(u0_);
    }
}

double SystemPsiModel::max_x() const {
    return ext_ ? std::numeric_limits<double>::infinity() : index_.x_max();
}

double SystemPsiModel::theta_beyond_log(double v) const {
    if (!ext_ || v <= u0_) return 0.0;
    return ext_->theta_smooth_log(v) - T0_;
}

double SystemPsiModel::psi(double x) const {
    if (x <= index_.x_max()) return index_.psi(x);
    if (!ext_) throw std::domain_error("psi: x beyond the computable range");
    const double u = std::log(x);
    CompensatedSum<double> s;
    // Listed primes with all their powers, then the smooth continuation.
    const double lp1 = log_p_.empty() ? u : log_p_.front();
    const auto nmax = static_cast<std::int64_t>(std::floor(u / lp1));
    for (std::int64_t n = 1; n <= nmax; ++n) {
        const double v = u / static_cast<double>(n);
        const auto k = std::upper_bound(log_p_.begin(), log_p_.end(), v) - log_p_.begin();
        if (k == 0) break;
        s.add(index_.theta(index_.primes()[k - 1]));
    }
    for (std::int64_t n = 1; u / static_cast<double>(n) > u0_; ++n) s.add(theta_beyond_log(u / n));
    return s.value();
}

void SystemPsiModel::jumps(double a, double b, std::vector<std::pair<double, double>>& out) const {
    out.clear();
    const auto& jx = index_.jump_x();
    const auto& pa = index_.psi_after();
    auto it = std::lower_bound(jx.begin(), jx.end(), a);
    for (; it != jx.end() && *it <= b; ++it) {
        const auto i = it - jx.begin();
        if (i + 1 < static_cast<std::ptrdiff_t>(jx.size()) && jx[i + 1] == *it) continue;
        out.emplace_back(*it, pa[i]);
    }
}

void SystemPsiModel::atoms(double u_lo, double u_hi, const std::function<void(double, double)>& cb) const {
    for (double lp : log_p_) {
        if (lp > u_hi) break;
        const double k0 = std::max(1.0, std::floor(u_lo / lp));
        for (double k = k0; k * lp <= u_hi; k += 1.0) {
            const double u = k * lp;
            if (u > u_lo) cb(u, lp);
        }
    }
}

cplx SystemPsiModel::smooth_delta_density(double u) const {
    if (!ext_) return -std::exp(u);
    double d;
    if (u > u0_) {
        // -e^u + u g(u) written without cancellation: e^u rest - 1 - rest,
        // where rest = f0'(e^u) - 1.
        const double rest = ext_->f0_prime_excess_log(u);
        d = std::exp(u) * rest - 1.0 - rest;
    } else {
        d = -std::exp(u);
    }
    for (int n = 2; u / n > u0_; ++n) {
        const double v = u / n;
        d += v / n * ext_->dF_du(v);
    }
    return d;
}

double SystemPsiModel::measure_limit_u() const {
    return ext_ ? std::numeric_limits<double>::infinity() : std::log(index_.x_max());
}

SummaryTables chebyshev_tables(const PrimeSystem& ps, const std::vector<double>& grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 1.0)) throw std::domain_error("chebyshev_tables: grid points must exceed 1");
        if (grid[i] > ps.x_max)
            throw std::domain_error("chebyshev_tables: grid point " + format_double(grid[i]) +
                                    " beyond x_max " + format_double(ps.x_max));
        if (i && !(grid[i] > grid[i - 1])) throw std::invalid_argument("chebyshev_tables: grid must increase");
    }
    ChebyshevIndex idx(ps);
    SummaryTables t;
    t.grid = grid;
    t.N.assign(grid.size(), std::nullopt);
    for (double x : grid) {
        t.psi.push_back(idx.psi(x));
        t.theta.push_back(idx.theta(x));
        t.Pi.push_back(idx.Pi(x));
        t.Delta.push_back(t.psi.back() - x);
    }
    return t;
}

void attach_counts(SummaryTables& t, const IntegerCounts& counts) {
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        auto it = std::lower_bound(counts.grid.begin(), counts.grid.end(), t.grid[i]);
        if (it != counts.grid.end() && *it == t.grid[i]) t.N[i] = counts.N_values[it - counts.grid.begin()];
    }
}

std::string tables_csv(const SummaryTables& t) {
    std::string s = "x,N,psi,theta,Pi,Delta\n";
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        s += format_double(t.grid[i]) + ",";
        if (t.N[i]) s += std::to_string(*t.N[i]);
        s += "," + format_double(t.psi[i]) + "," + format_double(t.theta[i]) + "," + format_double(t.Pi[i]) +
             "," + format_double(t.Delta[i]) + "\n";
    }
    return s;
}

}  // namespace beurling
