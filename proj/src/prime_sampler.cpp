#include "beurling/prime_sampler.hpp"

#include "beurling/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace beurling {

std::string to_string(SamplerMethod m) { return m == SamplerMethod::quantile ? "quantile" : "dmv-random"; }

SamplerMethod parse_sampler_method(const std::string& s) {
    if (s == "quantile") return SamplerMethod::quantile;
    if (s == "dmv-random") return SamplerMethod::dmv_random;
    throw std::invalid_argument("unknown sampler '" + s + "' (expected quantile or dmv-random)");
}

std::size_t PrimeSystem::count_upto(double x) const {
    return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
}

PrimeSystem sample_primes(const CountingFunction& F, SamplerMethod method, std::uint64_t seed,
                          double x_max) {
    if (!(x_max >= 1.0) || !std::isfinite(x_max))
        throw std::invalid_argument("sample_primes: x_max must be finite and >= 1");
    const double total = F.value(x_max);
    if (!(total >= 1.0)) {
        throw EmptySystemError("sample_primes: F(x_max) = " + std::to_string(total) +
                               " < 1, no prime below the cutoff");
    }
    PrimeSystem ps;
    ps.method = method;
    ps.seed = method == SamplerMethod::quantile ? 0 : seed;
    ps.x_max = x_max;
    ps.density_fingerprint = sha256(F.fingerprint_source());

    auto push = [&](double p) {
        p = std::min(p, x_max);  // inversion rounding at the last level
        if (!ps.primes.empty() && p <= ps.primes.back()) {
            const double q = std::nextafter(ps.primes.back(), INFINITY);
            std::clog << "warning: prime collision at " << p << ", moved to " << q << '\n';
            ++ps.collisions;
            p = q;
        }
        ps.primes.push_back(p);
    };

    if (method == SamplerMethod::quantile) {
        const auto count = static_cast<std::size_t>(std::floor(total + 0.5));
        ps.primes.reserve(count);
        for (std::size_t j = 1; j <= count; ++j) push(F.inverse(static_cast<double>(j) - 0.5));
    } else {
        Rng rng(seed);
        ps.primes.reserve(static_cast<std::size_t>(total) + 1);
        for (std::size_t j = 1; static_cast<double>(j - 1) < total; ++j) {
            const double level = static_cast<double>(j - 1) + rng.uniform();
            if (level > total) break;
            push(F.inverse(level));
        }
    }
    return ps;
}

double max_count_deviation(const PrimeSystem& ps, const CountingFunction& F) {
    double worst = 0.0;
    const auto& p = ps.primes;
    std::size_t i = 0;
    while (i < p.size()) {
        std::size_t j = i;
        while (j + 1 < p.size() && p[j + 1] == p[i]) ++j;
        const double Fx = F.value(p[i]);
        worst = std::max(worst, std::abs(static_cast<double>(i) - Fx));      // left limit
        worst = std::max(worst, std::abs(static_cast<double>(j + 1) - Fx));  // value at the jump
        if (j + 1 < p.size()) {
            const double mid = 0.5 * (p[i] + p[j + 1]);
            worst = std::max(worst, std::abs(static_cast<double>(j + 1) - F.value(mid)));
        }
        i = j + 1;
    }
    if (ps.x_max >= 1.0) {
        worst = std::max(worst, std::abs(static_cast<double>(ps.count_upto(ps.x_max)) - F.value(ps.x_max)));
    }
    return worst;
}

cplx discrepancy_J(const PrimeSystem& ps, const CountingFunction& F, double x, double t) {
    if (!(x >= 1.0 && x <= ps.x_max))
        throw std::domain_error("discrepancy_J: x must lie in [1, x_max]");
    CompensatedSum<cplx> s;
    for (double p : ps.primes) {
        if (p > x) break;
        s.add(std::polar(1.0, -t * std::log(p)));
    }
    return s.value() - F.oscillatory_integral(x, t);
}

JConstantReport empirical_J_constant(const PrimeSystem& ps, const CountingFunction& F,
                                     const std::vector<double>& xs, const std::vector<double>& ts) {
    JConstantReport rep;
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    for (double t : ts) {
        CompensatedSum<cplx> s;
        std::size_t next = 0;
        for (double x : sorted) {
            if (!(x >= 1.0 && x <= ps.x_max))
                throw std::domain_error("empirical_J_constant: x outside [1, x_max]");
            while (next < ps.primes.size() && ps.primes[next] <= x) {
                s.add(std::polar(1.0, -t * std::log(ps.primes[next])));
                ++next;
            }
            const double J = std::abs(s.value() - F.oscillatory_integral(x, t));
            const double shape =
                std::sqrt(x) + std::sqrt(x * std::log(std::abs(t) + 1.0) / std::log(x + 1.0));
            if (J / shape > rep.C) rep = {J / shape, x, t};
        }
    }
    return rep;
}

namespace {

constexpr char kMagic[4] = {'B', 'P', 'R', 'M'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    os.write(reinterpret_cast<const char*>(raw), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    std::uint8_t raw[sizeof(T)];
    is.read(reinterpret_cast<char*>(raw), sizeof(T));
    if (!is) throw std::runtime_error("read_prime_system: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

}  // namespace

void write_prime_system(const std::string& path, const PrimeSystem& ps) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_prime_system: cannot open " + path);
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, kVersion);
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(ps.method));
    put_le<std::uint64_t>(os, ps.seed);
    put_le<double>(os, ps.x_max);
    put_le<std::uint64_t>(os, ps.primes.size());
    os.write(reinterpret_cast<const char*>(ps.density_fingerprint.data()), 32);
    for (double p : ps.primes) put_le<double>(os, p);
    if (!os) throw std::runtime_error("write_prime_system: write failed for " + path);
}

PrimeSystem read_prime_system(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_prime_system: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_prime_system: bad magic in " + path);
    const auto version = get_le<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("read_prime_system: unsupported version " + std::to_string(version));
    PrimeSystem ps;
    const auto method = get_le<std::uint8_t>(is);
    if (method > 1) throw std::runtime_error("read_prime_system: bad method byte");
    ps.method = static_cast<SamplerMethod>(method);
    ps.seed = get_le<std::uint64_t>(is);
    ps.x_max = get_le<double>(is);
    const auto count = get_le<std::uint64_t>(is);
    is.read(reinterpret_cast<char*>(ps.density_fingerprint.data()), 32);
    if (!is) throw std::runtime_error("read_prime_system: truncated header");
    const auto here = is.tellg();
    is.seekg(0, std::ios::end);
    const auto remaining = static_cast<std::uint64_t>(is.tellg() - here);
    is.seekg(here);
    if (count > remaining / 8) throw std::runtime_error("read_prime_system: truncated prime list");
    ps.primes.resize(count);
    for (auto& p : ps.primes) p = get_le<double>(is);
    return ps;
}

std::string prime_system_sidecar(const PrimeSystem& ps) {
    std::string s;
    s += "format = BPRM\n";
    s += "version = " + std::to_string(kVersion) + "\n";
    s += "method = " + to_string(ps.method) + "\n";
    s += "seed = " + std::to_string(ps.seed) + "\n";
    s += "x_max = " + format_double(ps.x_max) + "\n";
    s += "count = " + std::to_string(ps.primes.size()) + "\n";
    s += "density_fingerprint = " + to_hex(ps.density_fingerprint) + "\n";
    if (!ps.primes.empty()) {
        s += "first_prime = " + format_double(ps.primes.front()) + "\n";
        s += "last_prime = " + format_double(ps.primes.back()) + "\n";
    }
    return s;
}

}  // namespace beurling
