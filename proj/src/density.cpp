#include "beurling/density.hpp"

#include "beurling/hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace beurling {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPanelMax = 0.25;
constexpr double kPanelRelTol = 1e-12;
constexpr int kPanelMaxDepth = 24;

// 16-point Gauss-Legendre on [a, b].
template <class T, class F>
T gl16(F&& f, double a, double b) {
    using G16 = boost::math::quadrature::gauss<double, 16>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const auto& x = G16::abscissa();
    const auto& w = G16::weights();
    T s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
    return h * s;
}

}  // namespace

ZeroSpec::ZeroSpec(std::vector<Zero> zeros) : zeros_(std::move(zeros)) {
    for (const Zero& z : zeros_) {
        if (!std::isfinite(z.beta) || !std::isfinite(z.gamma))
            throw std::invalid_argument("ZeroSpec: non-finite zero");
        if (z.gamma < 0.0)
            throw std::invalid_argument("ZeroSpec: store gamma >= 0 (conjugates are implied)");
        if (z.mult < 1) throw std::invalid_argument("ZeroSpec: multiplicity must be positive");
    }
}

std::int64_t ZeroSpec::expanded_count() const {
    std::int64_t n = 0;
    for (const Zero& z : zeros_) n += (z.gamma > 0.0 ? 2 : 1) * static_cast<std::int64_t>(z.mult);
    return n;
}

double ZeroSpec::max_beta() const {
    double b = 0.0;
    for (const Zero& z : zeros_) b = std::max(b, z.beta);
    return b;
}

double ZeroSpec::max_gamma() const {
    double g = 0.0;
    for (const Zero& z : zeros_) g = std::max(g, z.gamma);
    return g;
}

std::vector<cplx> ZeroSpec::expanded() const {
    std::vector<cplx> out;
    for (const Zero& z : zeros_) {
        for (int k = 0; k < z.mult; ++k) {
            out.emplace_back(z.beta, z.gamma);
            if (z.gamma > 0.0) out.emplace_back(z.beta, -z.gamma);
        }
    }
    return out;
}

std::int64_t m_min(const ZeroSpec& zeros) {
    if (zeros.empty()) return 1;
    const double B = zeros.max_beta();
    if (B >= 1.0) throw std::domain_error("m_min: a zero with beta >= 1 makes M0 undefined");
    const double N = static_cast<double>(zeros.expanded_count());
    const double v = 2.0 * std::pow(N, 1.0 / (2.0 * (1.0 - B)));
    const double nearest = std::round(v);
    if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(v));
}

std::int64_t m_sharp(double r, const ZeroSpec& zeros) {
    if (zeros.empty()) return 1;
    const double B = zeros.max_beta();
    if (B >= 1.0) throw std::domain_error("m_sharp: a zero with beta >= 1");
    const double N = static_cast<double>(zeros.expanded_count());
    // Required M at u = log x: e^{u/2} (Z(u) - 1 - e^{(r-1)u}), where Z is the
    // zero contribution to f0'. Beyond u_end the bracket is negative.
    auto need = [&](double u) {
        double z = 0.0;
        for (const Zero& q : zeros.entries()) {
            const double w = (q.gamma > 0.0 ? 2.0 : 1.0) * q.mult;
            z += w * std::exp((q.beta - 1.0) * u) * std::cos(q.gamma * u);
        }
        return std::exp(0.5 * u) * (z - 1.0 - std::exp((r - 1.0) * u));
    };
    const double u_end = std::log(std::max(N, 1.0)) / (1.0 - B) + 1.0;
    const double step = std::min(0.01, 0.1 / std::max(1.0, zeros.max_gamma()));
    const auto n = static_cast<std::size_t>(std::ceil(u_end / step)) + 1;
    std::vector<double> v(n);
    double best = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = need(i * step);
        best = std::max(best, v[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool lo = i == 0 || v[i] >= v[i - 1];
        const bool hi = i + 1 == n || v[i] >= v[i + 1];
        if (!(lo && hi)) continue;
        double a = i == 0 ? 0.0 : (i - 1) * step, b = (i + 1) * step;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double x1 = b - g * (b - a), x2 = a + g * (b - a);
            if (need(x1) < need(x2))
                a = x1;
            else
                b = x2;
        }
        best = std::max(best, need(0.5 * (a + b)));
    }
    const double m = std::ceil(best + 1e-9);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
}

TargetDensity::TargetDensity(double r, ZeroSpec zeros, std::optional<std::int64_t> M, bool unsafe)
    : r_(r), zeros_(std::move(zeros)), unsafe_(unsafe) {
    if (!(r >= 0.5 && r < 1.0)) throw std::invalid_argument("TargetDensity: r must lie in [1/2, 1)");
    for (const Zero& z : zeros_.entries()) {
        if (!(z.beta > 0.5 && z.beta < 1.0))
            throw std::invalid_argument("TargetDensity: zero beta must lie in (1/2, 1)");
        if (!(z.beta > r))
            throw std::invalid_argument("TargetDensity: every zero needs beta > r");
    }
    M_ = M ? *M : m_min(zeros_);
    if (M_ < 0) throw std::invalid_argument("TargetDensity: M must be nonnegative");
    validate();
    const double gmax = zeros_.max_gamma();
    panel_ = gmax > 0.0 ? std::min(kPanelMax, kPi / gmax) : kPanelMax;
    for (const Zero& z : zeros_.entries()) {
        Term t;
        t.beta = z.beta;
        t.gamma = z.gamma;
        t.weight = (z.gamma > 0.0 ? 2.0 : 1.0) * z.mult;
        t.abs_rho = std::hypot(z.beta, z.gamma);
        t.arg_rho = std::atan2(z.gamma, z.beta);
        terms_.push_back(t);
    }
    expanded_ = zeros_.expanded();
    cache_.node.push_back(0.0);
    cache_.cumF.push_back(0.0);
    cache_.cumT.push_back(0.0);
}

TargetDensity::TargetDensity(const TargetDensity& o)
    : r_(o.r_), zeros_(o.zeros_), M_(o.M_), unsafe_(o.unsafe_), panel_(o.panel_),
      expanded_(o.expanded_), terms_(o.terms_) {
    std::shared_lock lock(o.mutex_);
    cache_ = o.cache_;
}

void TargetDensity::validate() const {
    if (unsafe_) return;
    if (M_ < 1) throw std::invalid_argument("TargetDensity: M must be a positive integer");
    const std::int64_t need = m_sharp(r_, zeros_);
    if (M_ < need) {
        throw std::invalid_argument("TargetDensity: M = " + std::to_string(M_) +
                                    " leaves f0 non-monotone; need M >= " + std::to_string(need) +
                                    " (m_min = " + std::to_string(m_min(zeros_)) + ")");
    }
}

double TargetDensity::f0(double x) const {
    if (!(x >= 1.0)) throw std::domain_error("f0: x must be >= 1");
    const double lx = std::log(x);
    CompensatedSum<double> s;
    s.add(x);
    s.add(std::pow(x, r_) / r_);
    s.add(2.0 * static_cast<double>(M_) * std::sqrt(x));
    for (const Term& t : terms_) {
        s.add(-t.weight * std::pow(x, t.beta) * std::cos(t.gamma * lx - t.arg_rho) / t.abs_rho);
    }
    return s.value();
}

double TargetDensity::f0_prime(double x) const {
    if (!(x >= 1.0)) throw std::domain_error("f0_prime: x must be >= 1");
    const double lx = std::log(x);
    CompensatedSum<double> s;
    s.add(1.0);
    s.add(std::pow(x, r_ - 1.0));
    s.add(static_cast<double>(M_) / std::sqrt(x));
    for (const Term& t : terms_) s.add(-t.weight * std::pow(x, t.beta - 1.0) * std::cos(t.gamma * lx));
    return s.value();
}

double TargetDensity::f0_prime_excess_log(double u) const {
    CompensatedSum<double> s;
    s.add(std::exp((r_ - 1.0) * u));
    s.add(static_cast<double>(M_) * std::exp(-0.5 * u));
    for (const Term& t : terms_) s.add(-t.weight * std::exp((t.beta - 1.0) * u) * std::cos(t.gamma * u));
    return s.value();
}

double TargetDensity::dF_du(double u) const {
    const double ratio = u == 0.0 ? 1.0 : std::expm1(u) / u;
    return ratio * (1.0 + f0_prime_excess_log(u));
}

void TargetDensity::ensure(double u) const {
    {
        std::shared_lock lock(mutex_);
        if (cache_.node.back() >= u) return;
    }
    std::unique_lock lock(mutex_);
    auto g = [this](double v) { return dF_du(v); };
    auto vg = [this](double v) { return v * dF_du(v); };
    while (cache_.node.back() < u) {
        const std::size_t k = static_cast<std::size_t>(std::llround(cache_.node.back() / panel_));
        const double a = static_cast<double>(k) * panel_;
        const double b = static_cast<double>(k + 1) * panel_;
        // Depth-first adaptive split; leaves appended left to right.
        struct Item {
            double a, b;
            int depth;
        };
        std::vector<Item> stack{{a, b, 0}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            double err = 0.0;
            const double val = gauss_legendre_pair<double>(g, it.a, it.b, err);
            const double tol = kPanelRelTol * std::max(std::abs(val), it.b - it.a);
            if (err > tol) {
                if (it.depth >= kPanelMaxDepth)
                    throw QuadratureError("F_eval: panel quadrature failed to converge", err);
                const double m = 0.5 * (it.a + it.b);
                stack.push_back({m, it.b, it.depth + 1});
                stack.push_back({it.a, m, it.depth + 1});
                continue;
            }
            double errT = 0.0;
            const double valT = gauss_legendre_pair<double>(vg, it.a, it.b, errT);
            cache_.accF.add(val);
            cache_.accT.add(valT);
            cache_.node.push_back(it.b);
            cache_.cumF.push_back(cache_.accF.value());
            cache_.cumT.push_back(cache_.accT.value());
        }
    }
}

void TargetDensity::locate(double u, double& a, double& b, double& Fa, double& Ta) const {
    ensure(u);
    std::shared_lock lock(mutex_);
    const auto& nd = cache_.node;
    auto it = std::upper_bound(nd.begin(), nd.end(), u);
    std::size_t k = static_cast<std::size_t>(it - nd.begin());
    if (k == 0) k = 1;
    if (k >= nd.size()) k = nd.size() - 1;
    a = nd[k - 1];
    b = nd[k];
    Fa = cache_.cumF[k - 1];
    Ta = cache_.cumT[k - 1];
}

double TargetDensity::F_log(double u) const {
    if (u < 0.0) throw std::domain_error("F: x must be >= 1");
    if (u == 0.0) return 0.0;
    double a, b, Fa, Ta;
    locate(u, a, b, Fa, Ta);
    if (u == a) return Fa;
    return Fa + gl16<double>([this](double v) { return dF_du(v); }, a, u);
}

double TargetDensity::F(double x) const {
    if (!(x >= 1.0)) throw std::domain_error("F: x must be >= 1");
    return F_log(std::log(x));
}

double TargetDensity::theta_smooth_log(double u) const {
    if (u < 0.0) throw std::domain_error("theta_smooth: x must be >= 1");
    if (u == 0.0) return 0.0;
    double a, b, Fa, Ta;
    locate(u, a, b, Fa, Ta);
    if (u == a) return Ta;
    return Ta + gl16<double>([this](double v) { return v * dF_du(v); }, a, u);
}

double TargetDensity::inverse_log(double level) const {
    if (!std::isfinite(level)) throw std::domain_error("inverse: non-finite level");
    if (level <= 0.0) return 0.0;
    // Grow the cache until it covers the level.
    for (;;) {
        double top_u, top_F;
        {
            std::shared_lock lock(mutex_);
            top_u = cache_.node.back();
            top_F = cache_.cumF.back();
        }
        if (top_F >= level) break;
        ensure(top_u + std::max(1.0, 16.0 * panel_));
    }
    double a, b, Fa, Fb;
    {
        std::shared_lock lock(mutex_);
        const auto& cf = cache_.cumF;
        const std::size_t k =
            static_cast<std::size_t>(std::lower_bound(cf.begin(), cf.end(), level) - cf.begin());
        a = cache_.node[k - 1];
        b = cache_.node[k];
        Fa = cf[k - 1];
        Fb = cf[k];
    }
    const double left = a, Fleft = Fa;
    auto g = [this](double v) { return dF_du(v); };
    auto G = [&](double v) { return v == left ? Fleft - level : Fleft + gl16<double>(g, left, v) - level; };
    // Invariant: G(a) < 0 <= G(b).
    double x = Fb > Fa ? a + (b - a) * (level - Fa) / (Fb - Fa) : b;
    for (int it = 0; it < 200; ++it) {
        if (!(x > a && x <= b)) x = 0.5 * (a + b);
        const double gx = G(x);
        if (gx >= 0.0)
            b = x;
        else
            a = x;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b)) break;
        const double slope = g(x);
        double next = slope > 0.0 ? x - gx / slope : 0.5 * (a + b);
        if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) {
            if (gx >= 0.0) break;
            next = std::nextafter(x, INFINITY);
        }
        x = next;
    }
    return b;
}

double TargetDensity::inverse(double level) const { return std::exp(inverse_log(level)); }

cplx TargetDensity::oscillatory_integral_log(double u, double t) const {
    if (u < 0.0) throw std::domain_error("oscillatory_integral: x must be >= 1");
    if (u == 0.0) return 0.0;
    ensure(u);
    std::vector<double> nodes;
    {
        std::shared_lock lock(mutex_);
        auto it = std::upper_bound(cache_.node.begin(), cache_.node.end(), u);
        nodes.assign(cache_.node.begin(), it);
    }
    nodes.push_back(u);
    auto f = [&](double v) { return std::polar(dF_du(v), -t * v); };
    const double piece = std::abs(t) > 0.0 ? std::min(panel_, kPi / (2.0 * std::abs(t))) : panel_;
    CompensatedSum<cplx> s;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const double a = nodes[k], b = nodes[k + 1];
        if (b <= a) continue;
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
        for (int j = 0; j < n; ++j) {
            const double lo = a + (b - a) * j / n;
            const double hi = j + 1 == n ? b : a + (b - a) * (j + 1) / n;
            s.add(gl16<cplx>(f, lo, hi));
        }
    }
    return s.value();
}

cplx TargetDensity::oscillatory_integral(double x, double t) const {
    if (!(x >= 1.0)) throw std::domain_error("oscillatory_integral: x must be >= 1");
    return oscillatory_integral_log(std::log(x), t);
}

std::string TargetDensity::fingerprint_source() const {
    std::vector<Zero> z = zeros_.entries();
    std::sort(z.begin(), z.end(), [](const Zero& a, const Zero& b) {
        return std::tie(a.gamma, a.beta, a.mult) < std::tie(b.gamma, b.beta, b.mult);
    });
    std::string s = "target-density;r=" + format_double(r_) + ";M=" + std::to_string(M_) +
                    ";unsafe=" + (unsafe_ ? "1" : "0") + ";zeros=";
    for (const Zero& q : z) {
        s += format_double(q.beta) + "," + format_double(q.gamma) + "," + std::to_string(q.mult) + "|";
    }
    return s;
}

double TargetDensity::chebyshev_constant(double x_lo, double x_hi, int points) const {
    if (!(x_lo > 1.0 && x_hi >= x_lo && points >= 2))
        throw std::invalid_argument("chebyshev_constant: need 1 < x_lo <= x_hi and points >= 2");
    double best = 0.0;
    const double a = std::log(x_lo), b = std::log(x_hi);
    for (int i = 0; i < points; ++i) {
        const double u = a + (b - a) * i / (points - 1);
        best = std::max(best, F_log(u) * u / std::exp(u));
    }
    return best;
}

}  // namespace beurling
