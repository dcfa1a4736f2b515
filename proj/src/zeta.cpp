#include "beurling/zeta.hpp"

#include "beurling/hash.hpp"
#include "beurling/quadrature.hpp"
#include "beurling/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beurling {

namespace {

constexpr double kPi = std::numbers::pi;

// -Log(1 - w) with care for small |w|.
cplx neg_log1m(cplx w) {
    const double re = -0.5 * std::log1p(-2.0 * w.real() + std::norm(w));
    const double im = -std::atan2(-w.imag(), 1.0 - w.real());
    return {re, im};
}

double upper_bound_excess(const TargetDensity& d, double u) {
    double s = std::exp((d.r() - 1.0) * u) + static_cast<double>(d.M()) * std::exp(-0.5 * u);
    for (const Zero& z : d.zeros().entries())
        s += (z.gamma > 0.0 ? 2.0 : 1.0) * z.mult * std::exp((z.beta - 1.0) * u);
    return s;
}

}  // namespace

cplx density_mellin_tail(const TargetDensity& d, double X, cplx s, int k, double* remainder) {
    const double sigma = s.real();
    if (!(sigma > 1.0)) throw std::domain_error("density_mellin_tail: need Re s > 1");
    if (!(X >= 2.0)) throw std::domain_error("density_mellin_tail: need X >= 2");
    if (k < 0 || k > 2) throw std::invalid_argument("density_mellin_tail: k must be 0, 1 or 2");
    const double U = std::log(X);
    const double L = 40.0 / (sigma - 1.0);
    const double U_end = U + L;
    // e^{-su} u^k g(u) = u^{k-1} (e^{(1-s)u} - e^{-su}) f0'(e^u)
    auto h = [&](double u) {
        const cplx e1 = std::exp((1.0 - s) * u);
        const cplx e0 = std::exp(-s * u);
        return std::pow(u, k - 1) * (e1 - e0) * (1.0 + d.f0_prime_excess_log(u));
    };
    const double freq = std::abs(s.imag()) + d.zeros().max_gamma() + 1.0;
    const double width = std::min(0.5, kPi / freq);
    const int panels = static_cast<int>(std::ceil(L / width));
    CompensatedSum<cplx> acc;
    for (int i = 0; i < panels; ++i) {
        const double a = U + L * i / panels, b = i + 1 == panels ? U_end : U + L * (i + 1) / panels;
        double err = 0.0;
        acc.add(gauss_legendre_pair<cplx>(h, a, b, err));
    }
    if (remainder) {
        const double e = std::exp((1.0 - sigma) * U_end);
        const double c = sigma - 1.0;
        double tail;
        if (k == 0)
            tail = e / (c * U_end);
        else if (k == 1)
            tail = e / c;
        else
            tail = e * (U_end / c + 1.0 / (c * c));
        *remainder = 2.0 * (1.0 + upper_bound_excess(d, U_end)) * tail;
    }
    return acc.value();
}

PrimeTailBound density_tail_bound(const TargetDensity& d) {
    return [&d](double X, double sigma, int k) {
        double rem = 0.0;
        const double main = std::abs(density_mellin_tail(d, std::max(X, 8.0), sigma, k, &rem));
        const double lx = std::log(X);
        return main + rem + 4.0 * std::pow(X, -sigma) * std::pow(lx, k);
    };
}

ZetaContext::ZetaContext(const PrimeSystem& ps, const TargetDensity* d, double X_cut, TailPolicy policy,
                         double margin, double max_tail)
    : ZetaContext(ps, d ? density_tail_bound(*d) : PrimeTailBound{}, X_cut, policy, margin, max_tail) {
    d_ = d;
}

ZetaContext::ZetaContext(const PrimeSystem& ps, PrimeTailBound tail, double X_cut, TailPolicy policy,
                         double margin, double max_tail)
    : tail_(std::move(tail)), X_cut_(X_cut), policy_(policy), margin_(margin), max_tail_(max_tail) {
    if (!(X_cut >= 1.0)) throw std::invalid_argument("ZetaContext: X_cut must be >= 1");
    if (X_cut > ps.x_max)
        throw std::invalid_argument("ZetaContext: X_cut exceeds the sampled range x_max");
    if (!(margin > 0.0)) throw std::invalid_argument("ZetaContext: margin must be positive");
    for (double p : ps.primes) {
        if (p > X_cut) break;
        primes_.push_back(p);
        logs_.push_back(std::log(p));
    }
    index_ = std::make_unique<ChebyshevIndex>(primes_, X_cut);
}

void ZetaContext::check_region(cplx s, const char* op) const {
    if (!(s.real() >= 1.0 + margin_)) {
        throw std::domain_error(std::string(op) + ": Re s = " + format_double(s.real()) +
                                " lies in the divergence region Re s < 1 + " + format_double(margin_));
    }
}

double ZetaContext::euler_tail(double sigma, int k) const {
    if (!tail_) return 0.0;
    const double b = tail_(X_cut_, sigma, k) / (1.0 - std::pow(X_cut_, -sigma));
    if (policy_ == TailPolicy::reject && b > max_tail_) {
        throw std::domain_error("zeta: truncation tail bound " + format_double(b) + " exceeds " +
                                format_double(max_tail_) + " at sigma = " + format_double(sigma));
    }
    return b;
}

ZetaValue ZetaContext::log_zeta(cplx s) const {
    check_region(s, "log_zeta");
    CompensatedSum<cplx> acc;
    for (double lp : logs_) acc.add(neg_log1m(std::exp(-s * lp)));
    return {acc.value(), euler_tail(s.real(), 0)};
}

ZetaValue ZetaContext::zeta_euler(cplx s) const {
    ZetaValue lz = log_zeta(s);
    return {std::exp(lz.value), lz.tail_bound};
}

cplx ZetaContext::log_zeta_tracked(cplx s, double dt) const {
    check_region(s, "log_zeta_tracked");
    if (!(dt > 0.0)) throw std::invalid_argument("log_zeta_tracked: dt must be positive");
    auto product = [&](cplx z) {
        cplx prod = 1.0;
        for (double lp : logs_) prod /= (1.0 - std::exp(-z * lp));
        return prod;
    };
    const double sigma = s.real(), t = s.imag();
    double re = std::log(product(sigma).real());
    double arg = 0.0;
    const int steps = static_cast<int>(std::ceil(std::abs(t) / dt));
    for (int i = 1; i <= steps; ++i) {
        const cplx z(sigma, t * i / steps);
        const cplx v = product(z);
        double a = std::arg(v);
        a += 2.0 * kPi * std::round((arg - a) / (2.0 * kPi));
        arg = a;
        re = std::log(std::abs(v));
    }
    return {re, arg};
}

cplx ZetaContext::zeta_dirichlet(cplx s, double X) const {
    if (X > X_cut_) throw std::domain_error("zeta_dirichlet: X beyond the enumeration cutoff X_cut");
    if (!(X >= 1.0)) throw std::domain_error("zeta_dirichlet: X must be >= 1");
    CompensatedSum<cplx> acc;
    std::vector<double> usable(primes_.begin(), std::upper_bound(primes_.begin(), primes_.end(), X));
    enumerate_norms(usable, X, EnumMode::stream, {}, [&](double g) {
        acc.add(std::exp(-s * std::log(g)));
        return true;
    });
    return acc.value();
}

double ZetaContext::dirichlet_tail(double sigma, double X) const {
    const ZetaValue z = log_zeta(sigma);
    const double full = std::exp(z.value.real() + z.tail_bound);
    return std::max(0.0, full - zeta_dirichlet(sigma, X).real());
}

ZetaValue ZetaContext::log_deriv(cplx s) const {
    check_region(s, "log_deriv");
    CompensatedSum<cplx> acc;
    for (double lp : logs_) {
        const cplx w = std::exp(-s * lp);
        acc.add(lp * w / (1.0 - w));
    }
    return {acc.value(), euler_tail(s.real(), 1)};
}

ZetaValue ZetaContext::d_function(cplx s) const {
    if (s == cplx(1.0, 0.0)) throw PoleError("d_function: pole at s = 1");
    ZetaValue ld = log_deriv(s);
    return {ld.value - s / (s - 1.0), ld.tail_bound};
}

ZetaValue ZetaContext::d_function_quadrature(cplx s) const {
    check_region(s, "d_function_quadrature");
    const double X = X_cut_;
    const auto& jx = index_->jump_x();
    const auto& pa = index_->psi_after();
    CompensatedSum<cplx> acc;
    for (std::size_t i = 0; i < jx.size(); ++i) {
        const double lp = pa[i] - (i ? pa[i - 1] : 0.0);
        acc.add(lp * std::exp(-s * std::log(jx[i])));
    }
    const double psiX = index_->psi(X);
    const cplx Xs = std::exp(-s * std::log(X));
    const cplx value = acc.value() - psiX * Xs - s / (s - 1.0) + s * X * Xs / (s - 1.0);
    // Distance to D(s): higher powers p^k > X of listed primes, primes beyond
    // X, and the boundary terms.
    const double sigma = s.real();
    double high = 0.0;
    for (double lp : logs_) {
        const double k0 = std::floor(std::log(X) / lp) + 1.0;
        const double w = std::exp(-sigma * lp);
        high += lp * std::exp(-sigma * k0 * lp) / (1.0 - w);
    }
    const double bound = high + euler_tail(sigma, 1) + psiX * std::pow(X, -sigma) +
                         std::abs(s) * std::pow(X, 1.0 - sigma) / std::abs(s - 1.0);
    return {value, bound};
}

cplx ZetaContext::rstar_empirical(cplx s) const {
    if (!d_) throw std::invalid_argument("rstar_empirical: needs the target density");
    cplx lz = log_zeta(s).value;
    if (policy_ == TailPolicy::estimate && X_cut_ >= 2.0) lz += density_mellin_tail(*d_, X_cut_, s, 0);
    return lz - mellin_L(*d_, s) - 0.5 * mellin_L(*d_, 2.0 * s);
}

double rstar_shape(cplx s) {
    const double sigma = s.real(), t = s.imag();
    if (!(sigma > 0.5)) throw std::domain_error("rstar_shape: need Re s > 1/2");
    return sigma / (sigma - 0.5) + sigma * std::sqrt(std::log(std::abs(t) + 2.0)) / std::sqrt(sigma - 0.5);
}

cplx mellin_I(cplx z, cplx s) {
    if (z.real() > 0.0) throw std::domain_error("mellin_I: need Re z <= 0");
    if (!(s.real() > 1.0)) throw std::domain_error("mellin_I: need Re s > 1");
    return std::log(s - z) - std::log(s - z - 1.0);
}

namespace {

cplx log_ratio(cplx num, cplx den, const char* what) {
    if (num == cplx(0.0) || den == cplx(0.0))
        throw PoleError(std::string("mellin_L: s hits the singularity of the ") + what + " term");
    return std::log(num) - std::log(den);
}

}  // namespace

cplx mellin_L(const TargetDensity& d, cplx s) {
    const double r = d.r();
    CompensatedSum<cplx> acc;
    acc.add(log_ratio(s, s - 1.0, "pole"));
    acc.add(log_ratio(s - r + 1.0, s - r, "x^r"));
    if (d.M() != 0) acc.add(static_cast<double>(d.M()) * log_ratio(s + 0.5, s - 0.5, "sqrt(x)"));
    for (const cplx& rho : d.zeros().expanded()) acc.add(-log_ratio(s - rho + 1.0, s - rho, "zero"));
    return acc.value();
}

cplx q_eval(const TargetDensity& d, cplx s) {
    const double r = d.r();
    if (s == cplx(1.0) || s == cplx(r) || (d.M() > 0 && s == cplx(0.5)))
        throw PoleError("q_eval: s is a pole of Q");
    cplx q = 1.0 / ((s - 1.0) * (s - r));
    q *= std::pow(s - 0.5, -static_cast<double>(d.M()));
    for (const cplx& rho : d.zeros().expanded()) q *= (s - rho);
    return q;
}

double zero_count_bound(double b, double T, double A_plus_kappa, double theta) {
    if (!(theta < b && b < 1.0)) throw std::domain_error("zero_count_bound: need theta < b < 1");
    if (!(T >= 5.0)) throw std::domain_error("zero_count_bound: need T >= 5");
    if (!(A_plus_kappa > 0.0)) throw std::domain_error("zero_count_bound: need A + kappa > 0");
    const double gap = b - theta;
    return (0.5 * T * std::log(T) + (2.0 * std::log(A_plus_kappa) + std::log(1.0 / gap) + 3.0) * T) / gap;
}

std::int64_t zero_count(const ZeroSpec& zeros, double b, double T) {
    std::int64_t n = 0;
    for (const cplx& rho : zeros.expanded())
        if (rho.real() >= b && rho.real() <= 1.0 && std::abs(rho.imag()) < T) ++n;
    return n;
}

}  // namespace beurling
