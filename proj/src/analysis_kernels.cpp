#include "beurling/analysis_kernels.hpp"

#include "beurling/quadrature.hpp"
#include "beurling/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beurling {

namespace {
constexpr double kPi = std::numbers::pi;
}

cplx gaussian_line_integral(double a, cplx b) {
    if (!(a > 0.0)) throw std::domain_error("gaussian_line_integral: a must be positive");
    return std::exp(-b * b / (4.0 * a)) / (2.0 * std::sqrt(kPi * a));
}

cplx gaussian_line_integral_numeric(double a, cplx b, double c) {
    if (!(a > 0.0)) throw std::domain_error("gaussian_line_integral_numeric: a must be positive");
    // s = c + i t, ds = i dt, so (1/(2 pi i)) ds = dt / (2 pi). The integrand
    // reaches exp(a c^2 + c Re b) while the result can be far smaller, so the
    // sum runs in extended precision.
    using L = long double;
    using lcplx = std::complex<L>;
    const lcplx bl(b.real(), b.imag());
    auto f = [&](L t) {
        const lcplx s(c, t);
        return std::exp(static_cast<L>(a) * s * s + bl * s);
    };
    const L T = 40.0L / std::sqrt(static_cast<L>(a));
    const int panels = 256;
    lcplx acc = 0;
    for (int i = 0; i < panels; ++i) {
        const L lo = -T + 2 * T * i / panels, hi = -T + 2 * T * (i + 1) / panels;
        acc += boost::math::quadrature::gauss<L, 30>::integrate(f, lo, hi);
    }
    const lcplx v = acc / (2.0L * std::numbers::pi_v<L>);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

EstimateReport verify_estimate_bounds(const std::vector<double>& sample_grid) {
    EstimateReport rep;
    auto record = [&](EstimatePoint p) {
        if (!p.in_domain) {
            ++rep.flagged;
        } else if (!p.holds) {
            rep.overall = false;
        }
        rep.points.push_back(p);
    };
    for (double g : sample_grid) {
        {
            EstimatePoint p{EstimateItem::gaussian_tail, g};
            p.in_domain = std::isfinite(g) && g >= 0.5;
            if (p.in_domain) {
                p.lhs = 0.5 * std::sqrt(kPi) * std::erfc(g);
                p.rhs = std::exp(-g * g);
                // lhs / rhs = \int_0^inf exp(-2Bt - t^2) dt stays representable when both sides underflow.
                auto h = [g](double t) { return std::exp(-2.0 * g * t - t * t); };
                const double ratio = integrate_adaptive<double>(h, 0.0, std::min(7.0, 40.0 / g), 1e-300, 1e-12).value;
                p.holds = ratio < 1.0;
            }
            record(p);
        }
        for (double lam : {1.0, 2.0, 3.0}) {
            for (double alpha : {0.25, 0.5, 0.75}) {
                EstimatePoint p{EstimateItem::log_power, g, lam, alpha};
                p.in_domain = std::isfinite(g) && g >= 1.0;
                if (p.in_domain) {
                    // Compare logarithms to avoid overflow for large x.
                    const double lx = std::log(g);
                    p.lhs = lx == 0.0 ? 0.0 : std::pow(lx, lam);
                    const double log_rhs = lam / alpha + lam * lam + alpha * lx;
                    p.rhs = std::exp(log_rhs);
                    p.holds = lx == 0.0 || lam * std::log(lx) <= log_rhs;
                }
                record(p);
            }
        }
        for (double R : {0.0, 1.0}) {
            EstimatePoint p{EstimateItem::cosine_mean, g, R};
            p.in_domain = std::isfinite(g) && g > 0.0;
            if (p.in_domain) {
                // Integrate between consecutive kinks of |cos|, where the integrand is smooth;
                // beyond |y| = 6.5 the Gaussian weight is below 1e-18.
                auto f = [&](double y) { return std::abs(std::cos(g * y + R)) * std::exp(-y * y); };
                const double Y = 6.5;
                const auto k0 = static_cast<std::int64_t>(std::ceil((-Y * g + R) / kPi - 0.5));
                const auto k1 = static_cast<std::int64_t>(std::floor((Y * g + R) / kPi - 0.5));
                CompensatedSum<double> acc;
                double left = -Y, err = 0.0;
                for (std::int64_t k = k0; k <= k1 + 1; ++k) {
                    const double right = k <= k1 ? ((k + 0.5) * kPi - R) / g : Y;
                    if (right > left) acc.add(gauss_legendre_pair<double>(f, left, right, err));
                    left = std::max(left, right);
                }
                p.lhs = acc.value();
                p.rhs = 2.0 / std::sqrt(kPi) + 2.0 * kPi / g;
                p.holds = p.lhs <= p.rhs;
            }
            record(p);
        }
    }
    return rep;
}

double power_sum_re(const PowerSumInstance& inst, double L) {
    double s = inst.k;
    for (const cplx& w : inst.pairs) {
        const double r = std::abs(w);
        if (r == 0.0) continue;
        s += 2.0 * std::pow(r, L) * std::cos(std::arg(w) * L);
    }
    return s;
}

namespace {

// Golden-section maximisation on [lo, hi].
std::pair<double, double> golden_max(const PowerSumInstance& inst, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = power_sum_re(inst, x1), f2 = power_sum_re(inst, x2);
    for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = power_sum_re(inst, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = power_sum_re(inst, x1);
        }
    }
    return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

CasselsResult cassels_max(const PowerSumInstance& inst, int grid_density) {
    if (inst.k < 0) throw std::invalid_argument("cassels_max: k must be nonnegative");
    if (inst.k == 0 && inst.pairs.empty()) throw std::domain_error("cassels_max: empty instance");
    if (!(inst.H > 0.0)) throw std::invalid_argument("cassels_max: H must be positive");
    if (grid_density < 64) throw std::invalid_argument("cassels_max: grid_density must be >= 64");
    for (const cplx& w : inst.pairs) {
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw std::invalid_argument("cassels_max: non-finite pair entry");
    }
    const std::size_t n = inst.pairs.size();
    const double lo = inst.H, hi = (2.0 * n + 1.0) * inst.H;
    const std::size_t count =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - lo) * grid_density)) + 1);
    const double step = count > 1 ? (hi - lo) / (count - 1) : 0.0;
    std::vector<double> vals(count);
    for (std::size_t i = 0; i < count; ++i) vals[i] = power_sum_re(inst, lo + i * step);

    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    const std::size_t top = std::min<std::size_t>(3, count);
    std::partial_sort(order.begin(), order.begin() + top, order.end(), [&](std::size_t a, std::size_t b) {
        return vals[a] > vals[b] || (vals[a] == vals[b] && a < b);
    });
    std::vector<std::size_t> candidates(order.begin(), order.begin() + top);

    // Any grid local maximum within the curvature margin of the best grid value
    // may hide the true peak, so it is refined as well.
    double curvature = 0.0;
    for (const cplx& w : inst.pairs) {
        const double r = std::abs(w);
        if (r == 0.0) continue;
        const double c = std::abs(std::log(r)) + std::abs(std::arg(w));
        curvature += 2.0 * std::max(1.0, std::pow(r, lo)) * c * c;
    }
    const double margin = curvature * step * step / 8.0 + 1e-12;
    for (std::size_t i = 0; i < count; ++i) {
        const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
        const bool right_ok = i + 1 == count || vals[i] >= vals[i + 1];
        if (left_ok && right_ok && vals[i] >= vals[order[0]] - margin) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    CasselsResult best{vals[order[0]], lo + order[0] * step};
    for (std::size_t i : candidates) {
        if (!(hi > lo)) break;
        const double a = lo + (i == 0 ? 0 : i - 1) * step;
        const double b = std::min(hi, lo + (i + 1) * step);
        auto [x, fx] = golden_max(inst, a, b);
        if (fx > best.value || (fx == best.value && x < best.argmax_L)) best = {fx, x};
    }
    return best;
}

PowerSumInstance random_power_sum_instance(std::uint64_t seed) {
    Rng rng(seed);
    PowerSumInstance inst;
    inst.k = 1 + static_cast<int>(rng.below(4));
    const std::size_t np = rng.below(7);
    for (std::size_t j = 0; j < np; ++j) {
        const double r = 0.2 + 0.8 * rng.uniform();
        const double alpha = -kPi + 2.0 * kPi * rng.uniform();
        inst.pairs.push_back(std::polar(r, alpha));
    }
    inst.H = 0.5 + 9.5 * rng.uniform();
    return inst;
}

}  // namespace beurling
