#include "beurling/analysis_kernels.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace beurling;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid rule on Re s = c in extended precision; exponentially accurate for
// this entire, rapidly decaying integrand.
cplx line_integral_oracle(double a, cplx b, double c) {
    using L = long double;
    const L T = 40.0L / std::sqrt(static_cast<L>(a));
    const int n = 200000;
    const L h = 2 * T / n;
    const std::complex<L> bl(b.real(), b.imag());
    std::complex<L> sum = 0;
    for (int i = 0; i <= n; ++i) {
        const std::complex<L> s(c, -T + h * i);
        const std::complex<L> v = std::exp(static_cast<L>(a) * s * s + bl * s);
        sum += (i == 0 || i == n) ? v / 2.0L : v;
    }
    const std::complex<L> r = sum * h / (2 * std::numbers::pi_v<L>);
    return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return s * h / 3.0;
}

// Brute-force maximum on a very fine grid.
double brute_power_max(const PowerSumInstance& inst) {
    const double lo = inst.H, hi = (2.0 * inst.pairs.size() + 1.0) * inst.H;
    const int n = 400000;
    double best = -INFINITY;
    for (int i = 0; i <= n; ++i) best = std::max(best, power_sum_re(inst, lo + (hi - lo) * i / n));
    return best;
}

}  // namespace

TEST_CASE("gaussian line integral closed form", "[analysis_kernels]") {
    SECTION("reference values") {
        CHECK(gaussian_line_integral(1.0, 0.0).real() == Approx(0.2820947918).epsilon(1e-9));
        CHECK(gaussian_line_integral(1.0, 2.0).real() == Approx(0.1037768744).epsilon(1e-9));
        CHECK(gaussian_line_integral(4.0, 0.0).real() == Approx(0.1410473959).epsilon(1e-9));
    }
    SECTION("matches the trapezoid oracle on the (a, b) grid for several abscissae") {
        for (double a : {0.25, 1.0, 4.0}) {
            for (cplx b : {cplx(0, 0), cplx(1, 0), cplx(-1, 0), cplx(0, 2), cplx(0, -2), cplx(1, 1)}) {
                const cplx exact = gaussian_line_integral(a, b);
                for (double c : {-1.0, 0.0, 2.0}) {
                    const cplx oracle = line_integral_oracle(a, b, c);
                    CHECK(std::abs(exact - oracle) / std::abs(exact) < 1e-8);
                    const cplx numeric = gaussian_line_integral_numeric(a, b, c);
                    CHECK(std::abs(numeric - oracle) / std::abs(exact) < 1e-8);
                }
            }
        }
    }
    SECTION("nonpositive a is a domain error") {
        CHECK_THROWS_AS(gaussian_line_integral(0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(gaussian_line_integral(-1.0, 1.0), std::domain_error);
    }
}

TEST_CASE("elementary estimates", "[analysis_kernels]") {
    const EstimateReport rep = verify_estimate_bounds({0.5, 1.0, 2.0, 10.0, 1e6});
    CHECK(rep.overall);
    CHECK(rep.flagged == 9);  // x = 0.5 lies outside the log-power domain for all nine (lambda, alpha)

    for (const EstimatePoint& p : rep.points) {
        if (p.item == EstimateItem::gaussian_tail && p.p1 == 0.5) {
            const double tail = simpson([](double x) { return std::exp(-x * x); }, 0.5, 12.0, 20000);
            CHECK(p.lhs == Approx(tail).epsilon(1e-10));
            CHECK(p.lhs == Approx(0.4249).margin(1e-4));
            CHECK(p.rhs == Approx(std::exp(-0.25)));
        }
        if (p.item == EstimateItem::log_power && p.p1 == 1.0 && p.p2 == 1.0 && p.p3 == 0.5) {
            CHECK(p.lhs == 0.0);
            CHECK(p.rhs == Approx(std::exp(3.0)));
            CHECK(p.holds);
        }
        if (p.item == EstimateItem::cosine_mean && p.p1 == 2.0 && p.p2 == 0.0) {
            const double P = 2.0;
            const double q =
                simpson([P](double y) { return std::abs(std::cos(P * y)) * std::exp(-y * y); }, -9.0, 9.0, 400000);
            CHECK(p.lhs == Approx(q).epsilon(1e-8));
        }
    }

    const EstimateReport p2pi = verify_estimate_bounds({2.0 * kPi});
    for (const EstimatePoint& p : p2pi.points) {
        if (p.item == EstimateItem::cosine_mean && p.p2 == 0.0) {
            CHECK(p.rhs == Approx(2.0 / std::sqrt(kPi) + 1.0));
            CHECK(p.rhs == Approx(2.1284).margin(1e-4));
            CHECK(p.holds);
        }
    }

    const EstimateReport bad = verify_estimate_bounds({-1.0, NAN});
    CHECK(bad.overall);
    CHECK(bad.flagged == bad.points.size());
}

TEST_CASE("cassels maximum", "[analysis_kernels]") {
    SECTION("unit terms only") {
        const CasselsResult r = cassels_max({2, {}, 1.0}, 64);
        CHECK(r.value == Approx(2.0));
    }
    SECTION("one rotating pair") {
        const CasselsResult r = cassels_max({1, {cplx(0, 1)}, 2.0}, 64);
        CHECK(r.value == Approx(3.0).margin(1e-9));
        CHECK(r.argmax_L == Approx(4.0).margin(1e-6));
    }
    SECTION("negative real pair still reaches k") {
        const CasselsResult r = cassels_max({1, {std::polar(0.5, kPi)}, 1.0}, 64);
        CHECK(r.value >= 1.0);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(cassels_max({0, {}, 1.0}, 64), std::domain_error);
        CHECK_THROWS_AS(cassels_max({1, {}, 1.0}, 63), std::invalid_argument);
        CHECK_THROWS_AS(cassels_max({1, {}, 0.0}, 64), std::invalid_argument);
    }
    SECTION("random instances respect the lower bound and match a brute-force grid") {
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const PowerSumInstance inst = random_power_sum_instance(seed);
            REQUIRE(inst.k >= 1);
            REQUIRE(inst.k <= 4);
            REQUIRE(inst.pairs.size() <= 6);
            REQUIRE(inst.H >= 0.5);
            REQUIRE(inst.H <= 10.0);
            const CasselsResult r = cassels_max(inst, 256);
            CHECK(r.value >= inst.k - 1e-6);
            CHECK(r.argmax_L >= inst.H);
            CHECK(r.argmax_L <= (2.0 * inst.pairs.size() + 1.0) * inst.H);
            CHECK(r.value == Approx(power_sum_re(inst, r.argmax_L)).margin(1e-12));
            if (seed <= 20) CHECK(r.value >= brute_power_max(inst) - 1e-9);
        }
    }
    SECTION("deterministic instances") {
        const PowerSumInstance a = random_power_sum_instance(42), b = random_power_sum_instance(42);
        CHECK(a.k == b.k);
        CHECK(a.pairs == b.pairs);
        CHECK(a.H == b.H);
    }
}
