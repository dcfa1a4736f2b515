// Numerical integration and summation helpers shared by the modules.
#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace beurling {

using cplx = std::complex<double>;

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved);
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Neumaier compensated accumulator; works for double and complex<double>.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, double>) {
            step(sum_, comp_, x);
        } else {
            double sr = sum_.real(), cr = comp_.real();
            double si = sum_.imag(), ci = comp_.imag();
            step(sr, cr, x.real());
            step(si, ci, x.imag());
            sum_ = T(sr, si);
            comp_ = T(cr, ci);
        }
    }
    T value() const { return sum_ + comp_; }

private:
    static void step(double& s, double& c, double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    T sum_{};
    T comp_{};
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
};

namespace detail {
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cplx& z) { return std::abs(z); }
}  // namespace detail

// Fixed Gauss-Legendre pair on [a,b]: returns the 16-point value and sets
// `err` to |GL16 - GL8|.
template <class T, class F>
T gauss_legendre_pair(F&& f, double a, double b, double& err) {
    using G16 = boost::math::quadrature::gauss<double, 16>;
    using G8 = boost::math::quadrature::gauss<double, 8>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const auto& x16 = G16::abscissa();
    const auto& w16 = G16::weights();
    const auto& x8 = G8::abscissa();
    const auto& w8 = G8::weights();
    T s16{}, s8{};
    for (std::size_t i = 0; i < x16.size(); ++i) {
        s16 += w16[i] * (f(c - h * x16[i]) + f(c + h * x16[i]));
    }
    for (std::size_t i = 0; i < x8.size(); ++i) {
        s8 += w8[i] * (f(c - h * x8[i]) + f(c + h * x8[i]));
    }
    err = detail::magnitude(h * (s16 - s8));
    return h * s16;
}

// Single Gauss-Kronrod 21/10 step on [a,b].
template <class T, class F>
T gauss_kronrod_step(F&& f, double a, double b, double& err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    T fc = f(c);
    T sk = wk[0] * fc;
    T sg{};
    for (std::size_t i = 1; i < xk.size(); ++i) {
        T pair = f(c - h * xk[i]) + f(c + h * xk[i]);
        sk += wk[i] * pair;
        if (i % 2 == 1) sg += wg[i / 2] * pair;
    }
    err = detail::magnitude(h * (sk - sg));
    return h * sk;
}

// Globally adaptive Gauss-Kronrod: bisects the interval with the largest
// error estimate until the summed estimate meets max(abs_tol, rel_tol*|I|).
template <class T, class F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                 int max_intervals = 4000) {
    struct Piece {
        double a, b, err;
        T val;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    double e0 = 0.0;
    T v0 = gauss_kronrod_step<T>(f, a, b, e0);
    heap.push({a, b, e0, v0});
    T total = v0;
    double total_err = e0;
    int count = 1;
    while (total_err > std::max(abs_tol, rel_tol * detail::magnitude(total))) {
        if (count >= max_intervals) {
            throw QuadratureError("adaptive quadrature did not reach tolerance", total_err);
        }
        Piece p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        double el = 0.0, er = 0.0;
        T vl = gauss_kronrod_step<T>(f, p.a, m, el);
        T vr = gauss_kronrod_step<T>(f, m, p.b, er);
        heap.push({p.a, m, el, vl});
        heap.push({m, p.b, er, vr});
        ++count;
        // Recompute sums from the heap contents occasionally to avoid drift.
        total += vl + vr - p.val;
        total_err += el + er - p.err;
        if (count % 64 == 0) {
            auto copy = heap;
            CompensatedSum<T> s;
            double es = 0.0;
            while (!copy.empty()) {
                s.add(copy.top().val);
                es += copy.top().err;
                copy.pop();
            }
            total = s.value();
            total_err = es;
        }
    }
    CompensatedSum<T> s;
    double es = 0.0;
    while (!heap.empty()) {
        s.add(heap.top().val);
        es += heap.top().err;
        heap.pop();
    }
    return {s.value(), es};
}

// Composite Gauss-Kronrod over equal panels, adaptive inside each panel.
// Useful for oscillatory integrands where a single global start is too coarse.
template <class T, class F>
QuadResult<T> integrate_panels(F&& f, double a, double b, int panels, double abs_tol,
                               double rel_tol) {
    CompensatedSum<T> s;
    double err = 0.0;
    const double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * w;
        const double hi = (k + 1 == panels) ? b : a + (k + 1) * w;
        auto r = integrate_adaptive<T>(f, lo, hi, abs_tol / panels, rel_tol);
        s.add(r.value);
        err += r.error;
    }
    return {s.value(), err};
}

}  // namespace beurling
