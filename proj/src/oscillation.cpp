#include "beurling/oscillation.hpp"

#include "beurling/analysis_kernels.hpp"
#include "beurling/hash.hpp"
#include "beurling/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace beurling {

namespace {
constexpr double kPi = std::numbers::pi;
}

double zero_sum(const ZeroSpec& zeros, double x) {
    const double lx = std::log(x);
    CompensatedSum<double> s;
    for (const Zero& z : zeros.entries()) {
        const double w = (z.gamma > 0.0 ? 2.0 : 1.0) * z.mult;
        const double arg = std::atan2(z.gamma, z.beta);
        s.add(w * std::pow(x, z.beta) * std::cos(z.gamma * lx - arg) / std::hypot(z.beta, z.gamma));
    }
    return s.value();
}

RvmResult rvm_residual(const PsiModel& model, const ZeroSpec& zeros, const std::vector<double>& grid) {
    RvmResult res;
    for (double x : grid) {
        if (!(x >= 1.0 && x <= model.max_x()))
            throw std::domain_error("rvm_residual: grid point outside the psi-computable range");
        RvmPoint p;
        p.x = x;
        p.delta = model.psi(x) - x;
        p.residual = p.delta + zero_sum(zeros, x);
        res.max_over_sqrt = std::max(res.max_over_sqrt, std::abs(p.residual) / std::sqrt(x));
        res.points.push_back(p);
    }
    return res;
}

std::vector<RvmDecade> rvm_decade_scan(const PsiModel& model, const TargetDensity& d, double lo, double hi) {
    if (!(lo >= 1.0 && hi > lo)) throw std::invalid_argument("rvm_decade_scan: need 1 <= lo < hi");
    if (hi > model.step_limit()) throw std::domain_error("rvm_decade_scan: hi beyond the prime list");
    std::vector<RvmDecade> out;
    for (double a = lo; a < hi * (1.0 - 1e-12); a *= 10.0) out.push_back({a, std::min(hi, a * 10.0)});
    auto bin = [&](double x) {
        std::size_t k = static_cast<std::size_t>(std::floor(std::log10(x / lo) + 1e-12));
        return std::min(k, out.size() - 1);
    };
    auto record = [&](double x, double psi) {
        const double sq = std::sqrt(x);
        RvmDecade& dec = out[bin(x)];
        dec.max_over_sqrt = std::max(dec.max_over_sqrt, std::abs(psi - x + zero_sum(d.zeros(), x)) / sq);
        dec.corrected_over_sqrt = std::max(dec.corrected_over_sqrt, std::abs(psi - d.f0(x)) / sq);
    };
    std::vector<std::pair<double, double>> jumps;
    model.jumps(std::nextafter(lo, INFINITY), hi, jumps);
    double prev = model.psi(lo);
    record(lo, prev);
    for (const auto& [x, after] : jumps) {
        record(x, prev);
        record(x, after);
        prev = after;
    }
    record(hi, prev);
    return out;
}

namespace {

double k_value(const PsiModel& model, double beta0, double x) {
    return std::abs(model.psi(x) - x) / std::pow(x, beta0);
}

}  // namespace

KSupResult k_sup(const PsiModel& model, double beta0, double a, double b, double grid_ratio, double max_gamma) {
    if (!(a >= 1.0 && b >= a)) throw std::invalid_argument("k_sup: need 1 <= a <= b");
    if (b > model.max_x()) throw std::domain_error("k_sup: interval beyond the psi-computable range");
    if (!(grid_ratio > 1.0)) throw std::invalid_argument("k_sup: grid_ratio must exceed 1");
    const double allowed = max_grid_ratio(max_gamma);
    if (grid_ratio > allowed) {
        throw std::invalid_argument("k_sup: grid ratio " + format_double(grid_ratio) +
                                    " too coarse; oscillation with gamma = " + format_double(max_gamma) +
                                    " needs ratio <= " + format_double(allowed));
    }
    KSupResult best;
    auto consider = [&](double x, double psi, bool left) {
        const double v = std::abs(psi - x) / std::pow(x, beta0);
        if (v > best.K) best = {v, x, left};
    };
    const double step_hi = std::min(b, model.step_limit());
    if (a <= step_hi) {
        std::vector<std::pair<double, double>> jumps;
        model.jumps(std::nextafter(a, INFINITY), step_hi, jumps);
        double prev = model.psi(a);
        consider(a, prev, false);
        for (const auto& [x, after] : jumps) {
            consider(x, prev, true);
            consider(x, after, false);
            prev = after;
        }
        consider(step_hi, prev, false);
    }
    if (b > model.step_limit()) {
        // Smooth continuation: geometric grid plus golden refinement in log x.
        const double start = std::max(a, model.step_limit());
        const double la = std::log(start), lb = std::log(b), h = std::log(grid_ratio);
        const auto n = static_cast<std::size_t>(std::ceil((lb - la) / h)) + 1;
        std::vector<double> u(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = i + 1 == n ? lb : la + h * static_cast<double>(i);
            v[i] = k_value(model, beta0, std::exp(u[i]));
        }
        const double gmax = *std::max_element(v.begin(), v.end());
        for (std::size_t i = 0; i < n; ++i) {
            consider(std::exp(u[i]), model.psi(std::exp(u[i])), false);
            const bool lo_ok = i == 0 || v[i] >= v[i - 1];
            const bool hi_ok = i + 1 == n || v[i] >= v[i + 1];
            if (!(lo_ok && hi_ok) || v[i] < 0.9 * gmax) continue;
            double p = i == 0 ? u[0] : u[i - 1], q = i + 1 == n ? u[n - 1] : u[i + 1];
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            for (int it = 0; it < 50; ++it) {
                const double x1 = q - g * (q - p), x2 = p + g * (q - p);
                if (k_value(model, beta0, std::exp(x1)) < k_value(model, beta0, std::exp(x2)))
                    p = x1;
                else
                    q = x2;
            }
            const double xm = std::exp(0.5 * (p + q));
            consider(xm, model.psi(xm), false);
        }
    }
    return best;
}

UResult u_weighted(const PsiModel& model, cplx w, double m, bool crude_tail) {
    if (!(m >= 1.0)) throw std::invalid_argument("u_weighted: need m >= 1");
    const double M = 16.0 * m;
    const double sq = std::sqrt(m);
    const double norm = 1.0 / (2.0 * std::sqrt(kPi * m));
    const double U_top = M + 16.0 * m;
    const double limit = model.measure_limit_u();
    UResult res;
    double U_hi = U_top;
    if (limit < U_top) {
        if (limit < 28.0 * m && !crude_tail) {
            throw RangeError("u_weighted: psi known only up to log x = " + format_double(limit) +
                             ", need " + format_double(28.0 * m) + " (or enable the crude tail bound)");
        }
        U_hi = limit;
    }
    auto Phi = [&](double u) { return norm * std::exp(-w * u - (u - M) * (u - M) / (4.0 * m)); };

    CompensatedSum<cplx> acc;
    acc.add(model.delta_at_one() * Phi(0.0));
    model.atoms(0.0, U_hi, [&](double u, double mass) { acc.add(mass * Phi(u)); });

    // Continuous part in y = (u - M)/(2 sqrt m).
    const double y_lo = -8.0 * sq, y_hi = (U_hi - M) / (2.0 * sq);
    const double freq = 2.0 * sq * (std::abs(w.imag()) + model.oscillation_scale()) + 1.0;
    const double width = std::min(0.25, kPi / (2.0 * freq));
    const int panels = std::max(1, static_cast<int>(std::ceil((y_hi - y_lo) / width)));
    auto f = [&](double y) {
        const double u = M + 2.0 * sq * y;
        return model.smooth_delta_density(u) * std::exp(-w * u - y * y) / std::sqrt(kPi);
    };
    double qerr = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = y_lo + (y_hi - y_lo) * i / panels;
        const double b = i + 1 == panels ? y_hi : y_lo + (y_hi - y_lo) * (i + 1) / panels;
        double e = 0.0;
        acc.add(gauss_legendre_pair<cplx>(f, a, b, e));
        qerr += e;
    }
    res.value = acc.value();
    res.quad_error = qerr;

    if (U_hi < U_top) {
        // |Delta(e^u)| <= C u e^u with C from the known range, integrated by parts.
        const double xl = std::exp(U_hi);
        const double C = std::max(1.0, std::abs(model.psi(xl)) / (xl * U_hi)) + 1.0;
        auto bound = [&](double u) {
            const double phi = std::abs(Phi(u));
            return C * u * std::exp(u) * phi * std::abs(-w - (u - M) / (2.0 * m));
        };
        const double end = U_top + 20.0 * sq;
        res.tail_bound = C * U_hi * xl * std::abs(Phi(U_hi)) +
                         integrate_adaptive<double>(bound, U_hi, end, 1e-300, 1e-8).value;
    }
    return res;
}

UResult s_pair(const PsiModel& model, cplx rho0, double m, bool crude_tail) {
    UResult a = u_weighted(model, rho0, m, crude_tail);
    UResult b = u_weighted(model, std::conj(rho0), m, crude_tail);
    return {a.value + b.value, a.quad_error + b.quad_error, a.tail_bound + b.tail_bound};
}

ResidueSide residue_side(const TargetDensity& d, cplx rho0, double m) {
    if (!(m >= 1.0)) throw std::invalid_argument("residue_side: need m >= 1");
    const double M = 16.0 * m;
    auto term = [&](cplx s) { return std::exp(m * s * s + M * s); };
    ResidueSide out{};
    const auto zeros = d.zeros().expanded();
    for (const cplx w : {rho0, std::conj(rho0)}) {
        for (const cplx& rho : zeros) out.zero_terms -= term(rho - w);
        out.pole_terms += term(d.r() - w);
        if (d.M() > 0) out.pole_terms += static_cast<double>(d.M()) * term(0.5 - w);
        out.pole_terms -= gaussian_line_integral(m, M);
    }
    return out;
}

OscillationReport verify_lower_oscillation(const PsiModel& model, const TargetDensity& d, cplx rho0,
                                           double epsilon, double Y, double c) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("verify_lower_oscillation: epsilon must be positive");
    if (!(Y > 1.0 && c > 1.0)) throw std::invalid_argument("verify_lower_oscillation: need Y > 1 and c > 1");
    OscillationReport r;
    r.x_lo = Y;
    r.x_hi = std::pow(Y, c);
    if (r.x_hi > model.max_x()) {
        r.x_hi = model.max_x();
        r.truncated = true;
        r.note = "window truncated to the computable range";
    }
    if (r.x_hi < r.x_lo) throw RangeError("verify_lower_oscillation: Y beyond the computable range");
    const double gmax = d.zeros().max_gamma();
    const KSupResult k = k_sup(model, rho0.real(), r.x_lo, r.x_hi, max_grid_ratio(gmax), gmax);
    r.K = k.K;
    r.K_argmax = k.argmax;
    r.bound_lower = (kPi / 2.0 - epsilon) / std::abs(rho0);
    r.bound_upper = (kPi / 2.0 + 3.0 * epsilon) / std::abs(rho0);
    r.pass = r.K >= r.bound_lower;
    if (r.note.empty()) r.note = "one-sided check on a desk-scale window";
    return r;
}

ZeroSpec interference_layout(const SinePolynomial& sine, double v, double beta0) {
    sine.validate();
    std::vector<Zero> z;
    for (std::int64_t n : sine.indices) z.push_back({beta0, static_cast<double>(2 * n + 1) * v, 1});
    return ZeroSpec(z);
}

InterferenceReport verify_interference(const PsiModel& model, const TargetDensity& d,
                                       const SinePolynomial& sine, double v, double beta0, double epsilon,
                                       double x_lo, double x_hi) {
    sine.validate();
    const double N = static_cast<double>(sine.indices.size() - 1);
    if (!(v > (4.0 * N + 4.0) / epsilon)) {
        throw std::invalid_argument("verify_interference: v = " + format_double(v) +
                                    " must exceed (4N+4)/epsilon = " + format_double((4.0 * N + 4.0) / epsilon));
    }
    const ZeroSpec want = interference_layout(sine, v, beta0);
    auto key = [](std::vector<Zero> z) {
        std::sort(z.begin(), z.end(), [](const Zero& a, const Zero& b) { return a.gamma < b.gamma; });
        return z;
    };
    const auto have = key(d.zeros().entries()), need = key(want.entries());
    bool match = have.size() == need.size();
    for (std::size_t i = 0; match && i < have.size(); ++i) {
        match = std::abs(have[i].beta - need[i].beta) <= 1e-12 &&
                std::abs(have[i].gamma - need[i].gamma) <= 1e-12 * std::max(1.0, need[i].gamma) &&
                have[i].mult == need[i].mult;
    }
    if (!match)
        throw std::invalid_argument("verify_interference: density zeros do not follow beta0 + i(2n_k+1)v");

    const cplx rho0(beta0, v);
    InterferenceReport rep;
    OscillationReport& r = rep.base;
    r.x_lo = x_lo;
    r.x_hi = x_hi;
    const double gmax = d.zeros().max_gamma();
    const KSupResult k = k_sup(model, beta0, x_lo, x_hi, max_grid_ratio(gmax), gmax);
    r.K = k.K;
    r.K_argmax = k.argmax;
    r.bound_lower = (kPi / 2.0 - epsilon) / std::abs(rho0);
    r.bound_upper = (kPi / 2.0 + 3.0 * epsilon) / std::abs(rho0);
    if (x_hi <= model.step_limit()) {
        double mx = 0.0;
        for (const RvmDecade& dec : rvm_decade_scan(model, d, x_lo, x_hi)) mx = std::max(mx, dec.max_over_sqrt);
        r.rvm_residual_max_over_sqrt = mx;
    }
    rep.measured = r.K * std::abs(rho0);
    if (x_hi <= model.step_limit()) {
        auto corrected = [&](double x, double psi) {
            const double nuisance = std::pow(x, d.r()) / d.r() + 2.0 * static_cast<double>(d.M()) * std::sqrt(x);
            return std::abs(psi - x - nuisance) / std::pow(x, beta0);
        };
        std::vector<std::pair<double, double>> jumps;
        model.jumps(std::nextafter(x_lo, INFINITY), x_hi, jumps);
        double prev = model.psi(x_lo), worst = corrected(x_lo, prev);
        for (const auto& [x, after] : jumps) {
            worst = std::max({worst, corrected(x, prev), corrected(x, after)});
            prev = after;
        }
        worst = std::max(worst, corrected(x_hi, prev));
        rep.measured_corrected = worst * std::abs(rho0);
    }
    rep.bound = kPi / 2.0 + 3.0 * epsilon;
    rep.allowance = r.rvm_residual_max_over_sqrt * std::abs(rho0) * std::pow(x_lo, 0.5 - beta0);
    rep.pass_strict = rep.measured <= rep.bound;
    rep.pass_with_allowance = rep.measured <= rep.bound + rep.allowance;
    r.pass = rep.pass_strict;
    r.note = "finite window only; the bound is asymptotic in x";
    return rep;
}

std::string oscillation_csv(const PsiModel& model, const ZeroSpec& zeros, double beta0, double rho0_abs,
                            double lo, double hi, double ratio) {
    std::string s = "x,delta,delta_norm,rvm_residual\n";
    for (double x : geometric_grid(lo, hi, ratio)) {
        const double delta = model.psi(x) - x;
        s += format_double(x) + "," + format_double(delta) + "," +
             format_double(delta * rho0_abs / std::pow(x, beta0)) + "," +
             format_double(delta + zero_sum(zeros, x)) + "\n";
    }
    return s;
}

std::string summary_text(const OscillationReport& r) {
    std::ostringstream os;
    os << "interval = [" << format_double(r.x_lo) << ", " << format_double(r.x_hi) << "]\n"
       << "K = " << format_double(r.K) << " at x = " << format_double(r.K_argmax) << "\n"
       << "bound_lower = " << format_double(r.bound_lower) << "\n"
       << "bound_upper = " << format_double(r.bound_upper) << "\n"
       << "rvm_residual_max_over_sqrt = " << format_double(r.rvm_residual_max_over_sqrt) << "\n"
       << "truncated = " << (r.truncated ? "yes" : "no") << "\n"
       << "pass = " << (r.pass ? "yes" : "no") << "\n"
       << "note = " << r.note << "\n";
    return os.str();
}

}  // namespace beurling
