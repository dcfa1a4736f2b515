#include "beurling/prime_sampler.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace beurling;
using Catch::Approx;

namespace {

// F(x) = x - 1.
class LinearDensity : public CountingFunction {
public:
    double value(double x) const override { return x - 1.0; }
    double inverse(double level) const override { return level + 1.0; }
    cplx oscillatory_integral(double x, double t) const override {
        if (t == 0.0) return x - 1.0;
        const cplx e(1.0, -t);
        return (std::pow(cplx(x), e) - 1.0) / e;
    }
    std::string fingerprint_source() const override { return "linear"; }
};

// dF == 0 beyond the origin; only the prime sum survives.
class FlatDensity : public CountingFunction {
public:
    double value(double) const override { return 0.5; }
    double inverse(double) const override { return 1.0; }
    cplx oscillatory_integral(double, double) const override { return 0.0; }
    std::string fingerprint_source() const override { return "flat"; }
};

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("quantile sampling of a linear density", "[prime_sampler]") {
    const LinearDensity F;
    const PrimeSystem ps = sample_primes(F, SamplerMethod::quantile, 5, 10.0);
    REQUIRE(ps.primes.size() == 9);
    for (int j = 1; j <= 9; ++j) CHECK(ps.primes[j - 1] == Approx(j + 0.5));
    CHECK(ps.seed == 0);
    CHECK(max_count_deviation(ps, F) == Approx(0.5));
    CHECK_THROWS_AS(sample_primes(F, SamplerMethod::quantile, 0, 1.2), EmptySystemError);
    CHECK_THROWS_AS(sample_primes(F, SamplerMethod::quantile, 0, 0.5), std::invalid_argument);
}

TEST_CASE("random unit-level sampling", "[prime_sampler]") {
    const LinearDensity F;
    const PrimeSystem a = sample_primes(F, SamplerMethod::dmv_random, 17, 200.0);
    const PrimeSystem b = sample_primes(F, SamplerMethod::dmv_random, 17, 200.0);
    const PrimeSystem c = sample_primes(F, SamplerMethod::dmv_random, 18, 200.0);
    CHECK(a.primes == b.primes);
    CHECK(a.primes != c.primes);
    for (std::size_t j = 0; j < a.primes.size(); ++j) {
        CHECK(a.primes[j] >= 1.0 + j);
        CHECK(a.primes[j] <= 2.0 + j);
    }
    CHECK(max_count_deviation(a, F) <= 1.0);
}

TEST_CASE("sampling a constructed density", "[prime_sampler]") {
    const TargetDensity d(0.6, ZeroSpec({{0.75, 5.0, 1}}), 1);
    const double x_max = 1e5;
    const PrimeSystem q = sample_primes(d, SamplerMethod::quantile, 0, x_max);
    CHECK(q.primes.size() == static_cast<std::size_t>(std::floor(d.F(x_max) + 0.5)));
    CHECK(std::is_sorted(q.primes.begin(), q.primes.end()));
    CHECK(q.primes.front() > 1.0);
    CHECK(max_count_deviation(q, d) <= 0.5 + 1e-7);
    CHECK(q.density_fingerprint == sha256(d.fingerprint_source()));

    const PrimeSystem r = sample_primes(d, SamplerMethod::dmv_random, 3, x_max);
    CHECK(max_count_deviation(r, d) <= 1.0 + 1e-7);
    for (std::size_t j = 0; j < r.primes.size(); j += 97) {
        CHECK(d.F(r.primes[j]) >= static_cast<double>(j) - 1e-7);
        CHECK(d.F(r.primes[j]) <= static_cast<double>(j + 1) + 1e-7);
    }
    CHECK(sample_primes(d, SamplerMethod::quantile, 0, x_max).primes == q.primes);

    SECTION("J at t = 0 is the counting discrepancy") {
        for (double x : {10.0, 777.7, 5e4}) {
            const cplx J = discrepancy_J(q, d, x, 0.0);
            CHECK(J.real() == Approx(static_cast<double>(q.count_upto(x)) - d.F(x)).margin(1e-8));
            CHECK(J.imag() == Approx(0.0).margin(1e-10));
        }
        CHECK_THROWS_AS(discrepancy_J(q, d, 0.5, 1.0), std::domain_error);
        CHECK_THROWS_AS(discrepancy_J(q, d, 2e5, 1.0), std::domain_error);
    }
    SECTION("empirical J constant") {
        const JConstantReport rep = empirical_J_constant(q, d, {10.0, 100.0, 1e3, 1e4, 1e5}, {0.0, 1.0, 10.0, 100.0});
        CHECK(std::isfinite(rep.C));
        CHECK(rep.C > 0.0);
        const cplx J = discrepancy_J(q, d, rep.at_x, rep.at_t);
        const double shape =
            std::sqrt(rep.at_x) + std::sqrt(rep.at_x * std::log(std::abs(rep.at_t) + 1.0) / std::log(rep.at_x + 1.0));
        CHECK(rep.C == Approx(std::abs(J) / shape).epsilon(1e-9));
    }
}

TEST_CASE("discrepancy of a single prime", "[prime_sampler]") {
    PrimeSystem ps;
    ps.primes = {2.0};
    ps.x_max = 10.0;
    const cplx J = discrepancy_J(ps, FlatDensity{}, 3.0, 1.0);
    CHECK(J.real() == Approx(std::cos(std::log(2.0))));
    CHECK(J.imag() == Approx(-std::sin(std::log(2.0))));
}

TEST_CASE("binary prime system files", "[prime_sampler]") {
    const LinearDensity F;
    PrimeSystem ps = sample_primes(F, SamplerMethod::dmv_random, 99, 50.0);
    const std::string path = temp_path("beurling_test_roundtrip.bprm");
    write_prime_system(path, ps);
    CHECK(std::filesystem::file_size(path) == 65 + 8 * ps.primes.size());
    {
        std::ifstream f(path, std::ios::binary);
        char head[4];
        f.read(head, 4);
        CHECK(std::string(head, 4) == "BPRM");
    }
    const PrimeSystem back = read_prime_system(path);
    CHECK(back.primes == ps.primes);
    CHECK(back.method == ps.method);
    CHECK(back.seed == ps.seed);
    CHECK(back.x_max == ps.x_max);
    CHECK(back.density_fingerprint == ps.density_fingerprint);

    std::filesystem::resize_file(path, 65 + 8 * (ps.primes.size() - 1));
    CHECK_THROWS(read_prime_system(path));
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "NOPE";
    }
    CHECK_THROWS(read_prime_system(path));
    std::filesystem::remove(path);

    const std::string side = prime_system_sidecar(ps);
    CHECK(side.find("method = dmv-random") != std::string::npos);
    CHECK(side.find("count = " + std::to_string(ps.primes.size())) != std::string::npos);
    CHECK(parse_sampler_method("quantile") == SamplerMethod::quantile);
    CHECK(to_string(SamplerMethod::dmv_random) == "dmv-random");
    CHECK_THROWS_AS(parse_sampler_method("uniform"), std::invalid_argument);
}
