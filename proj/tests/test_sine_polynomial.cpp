#include "beurling/sine_polynomial.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace beurling;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double direct_eval(const std::vector<std::int64_t>& idx, double y) {
    double s = 0.0;
    for (auto n : idx) s += 2.0 * std::sin((2.0 * n + 1.0) * y) / (2.0 * n + 1.0);
    return s;
}

// Dense-grid oracle over [0, pi/2].
double dense_max(const std::vector<std::int64_t>& idx, int points) {
    double best = 0.0;
    for (int i = 0; i <= points; ++i) best = std::max(best, std::abs(direct_eval(idx, kPi / 2 * i / points)));
    return best;
}

// Odd m <= limit whose prime factors are all <= P.
std::vector<std::int64_t> smooth_oracle(std::int64_t P, std::int64_t N) {
    std::vector<std::int64_t> out;
    for (std::int64_t m = 1; m <= 2 * N + 1; m += 2) {
        std::int64_t r = m;
        for (std::int64_t q = 3; q <= P; q += 2)
            while (r % q == 0) r /= q;
        if (r == 1) out.push_back((m - 1) / 2);
    }
    return out;
}

}  // namespace

TEST_CASE("sine polynomial evaluation", "[sine_polynomial]") {
    SinePolynomial p;
    CHECK(eval(p, kPi / 2) == Approx(2.0));
    CHECK(eval(p, 0.0) == 0.0);
    p.indices = {0, 1, 2};
    CHECK(eval(p, kPi / 2) == Approx(2.0 * (1.0 - 1.0 / 3.0 + 1.0 / 5.0)));

    SECTION("oddness and reflection on random points") {
        SinePolynomial q;
        q.indices = {0, 1, 4, 13, 40};
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> U(-10.0, 10.0);
        for (int i = 0; i < 1000; ++i) {
            const double y = U(gen);
            CHECK(std::abs(eval(q, -y) + eval(q, y)) <= 1e-12);
            CHECK(std::abs(eval(q, kPi - y) - eval(q, y)) <= 1e-12);
            CHECK(eval(q, y) == Approx(direct_eval(q.indices, y)).margin(1e-12));
        }
    }
}

TEST_CASE("sine polynomial validation", "[sine_polynomial]") {
    SinePolynomial p;
    p.indices = {1, 2};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.indices = {0, 2, 2};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.indices = {0, 3, 1};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.indices = {};
    CHECK_THROWS(p.validate());
    p.indices = {0, 5};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("sup norm certification", "[sine_polynomial]") {
    SECTION("single term") {
        SinePolynomial p;
        CHECK(sup_norm(p, min_certification_grid(p)) == Approx(2.0).epsilon(1e-12));
        REQUIRE(p.certified_norm.has_value());
        CHECK(*p.certified_norm == Approx(2.0).epsilon(1e-12));
        CHECK(p.certification_grid == min_certification_grid(p));
    }
    SECTION("two terms against a dense oracle") {
        SinePolynomial p;
        p.indices = {0, 1};
        const double v = sup_norm(p, min_certification_grid(p));
        CHECK(v == Approx(dense_max({0, 1}, 1000000)).epsilon(1e-9));
        CHECK(v == Approx(1.885618).margin(1e-6));
    }
    SECTION("coarse grid is refused") {
        SinePolynomial p;
        p.indices = {0, 10};
        CHECK_THROWS_AS(sup_norm(p, min_certification_grid(p) - 1), std::invalid_argument);
        CHECK(min_certification_grid(p) == 16 * 21);
    }
    SECTION("envelope property") {
        SinePolynomial p;
        p.indices = {0, 1, 4, 13};
        const double v = sup_norm(p, min_certification_grid(p));
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> U(-kPi, kPi);
        for (int i = 0; i < 1000; ++i) CHECK(v >= std::abs(eval(p, U(gen))) - 1e-14);
        CHECK(v == Approx(dense_max(p.indices, 200000)).epsilon(1e-7));
    }
    SECTION("Gibbs trend") {
        double prev = INFINITY;
        for (int N : {10, 50, 200, 500}) {
            SinePolynomial p = consecutive_polynomial(N);
            const double v = sup_norm(p, min_certification_grid(p));
            CHECK(v < prev);
            CHECK(v > kPi / 2);
            prev = v;
        }
        CHECK(prev == Approx(1.8519).margin(0.02));
    }
}

TEST_CASE("smooth index polynomials", "[sine_polynomial]") {
    CHECK(smooth_index_polynomial(3, 13).indices == std::vector<std::int64_t>{0, 1, 4, 13});
    CHECK(smooth_index_polynomial(3, 1).indices == std::vector<std::int64_t>{0, 1});
    CHECK(smooth_index_polynomial(5, 7).indices == std::vector<std::int64_t>{0, 1, 2, 4, 7});
    for (std::int64_t P : {3, 5, 7, 11, 13}) {
        for (std::int64_t N : {1, 10, 40, 100}) CHECK(smooth_index_polynomial(P, N).indices == smooth_oracle(P, N));
    }
    CHECK(consecutive_polynomial(4).indices == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("low norm search", "[sine_polynomial]") {
    SECTION("epsilon 0.45") {
        const SearchResult r = search_low_norm(0.45, SearchStrategy::smooth, 1, 1000000);
        REQUIRE(r.success);
        REQUIRE(r.best.certified_norm.has_value());
        CHECK(*r.best.certified_norm <= kPi / 2 + 0.45);
        SinePolynomial again = r.best;
        CHECK(sup_norm(again, min_certification_grid(again)) == Approx(*r.best.certified_norm).epsilon(1e-12));
    }
    SECTION("epsilon 0.25 within budget") {
        const SearchResult r = search_low_norm(0.25, SearchStrategy::smooth, 1, 1000000);
        REQUIRE(r.success);
        CHECK(r.best_norm <= kPi / 2 + 0.25);
        CHECK(r.evaluations <= 1000000);
    }
    SECTION("annealing is seeded") {
        const SearchResult a = search_low_norm(0.4, SearchStrategy::anneal, 9, 300000);
        const SearchResult b = search_low_norm(0.4, SearchStrategy::anneal, 9, 300000);
        CHECK(a.best.indices == b.best.indices);
        CHECK(a.best_norm == b.best_norm);
        if (a.success) CHECK(a.best_norm <= kPi / 2 + 0.4);
    }
    SECTION("zero budget fails explicitly") {
        const SearchResult r = search_low_norm(0.45, SearchStrategy::smooth, 1, 0);
        CHECK_FALSE(r.success);
        CHECK_FALSE(r.message.empty());
    }
    SECTION("epsilon range") {
        CHECK_THROWS_AS(search_low_norm(0.0, SearchStrategy::smooth, 1, 10), std::invalid_argument);
        CHECK_THROWS_AS(search_low_norm(0.5, SearchStrategy::smooth, 1, 10), std::invalid_argument);
    }
}

TEST_CASE("sine polynomial record round trip", "[sine_polynomial]") {
    SinePolynomial p;
    p.indices = {0, 1, 4, 13};
    const std::string bare = serialize(p);
    CHECK(bare == "indices=0,1,4,13; norm=none; grid=0");
    SinePolynomial q = parse_sine_polynomial(bare);
    CHECK(q.indices == p.indices);
    CHECK_FALSE(q.certified_norm.has_value());
    sup_norm(p, min_certification_grid(p));
    const SinePolynomial r = parse_sine_polynomial(serialize(p));
    CHECK(r.indices == p.indices);
    CHECK(r.certified_norm == p.certified_norm);
    CHECK(r.certification_grid == p.certification_grid);
    CHECK_THROWS_AS(parse_sine_polynomial("indices=1,2; norm=none; grid=0"), std::invalid_argument);
    CHECK_THROWS(parse_sine_polynomial("garbage"));
    CHECK(parse_strategy(to_string(SearchStrategy::anneal)) == SearchStrategy::anneal);
    CHECK_THROWS_AS(parse_strategy("random"), std::invalid_argument);
}
