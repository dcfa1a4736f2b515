// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "beurling/analysis_kernels.hpp"
#include "beurling/chebyshev.hpp"
#include "beurling/config.hpp"
#include "beurling/density.hpp"
#include "beurling/oscillation.hpp"
#include "beurling/prime_sampler.hpp"
#include "beurling/runner.hpp"
#include "beurling/semigroup.hpp"
#include "beurling/sine_polynomial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace beurling;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Trapezoid rule along the imaginary axis in long double.
std::complex<long double> line_oracle(long double a, std::complex<long double> b) {
    const long double h = 0.005L / std::sqrt(a), T = 40.0L / std::sqrt(a);
    std::complex<long double> sum = 0.0L;
    const std::complex<long double> I(0.0L, 1.0L);
    for (long double t = -T; t <= T; t += h) {
        const std::complex<long double> s = I * t;
        sum += std::exp(a * s * s + b * s);
    }
    return sum * h / (2.0L * 3.14159265358979323846264338327950288L);
}

void brute(const std::vector<double>& p, std::size_t i, double acc, double X, std::vector<double>& out) {
    if (i == p.size()) {
        out.push_back(acc);
        return;
    }
    for (int e = 0;; ++e) {
        const double v = acc * std::pow(p[i], e);
        if (v > X) break;
        brute(p, i + 1, v, X, out);
    }
}

std::map<std::string, std::string> read_summary(const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// r = 0.6, one zero pair 0.75 +- 5i, M = 1, quantile primes up to 1e7.
const TargetDensity& reference_density() {
    static const TargetDensity d(0.6, ZeroSpec({{0.75, 5.0, 1}}), 1);
    return d;
}

const PrimeSystem& reference_system() {
    static const PrimeSystem ps = sample_primes(reference_density(), SamplerMethod::quantile, 0, 1e7);
    return ps;
}

}  // namespace

int main() {
    const fs::path scratch = fs::temp_directory_path() / "beurling_acceptance";
    fs::remove_all(scratch);

    criterion(1, "gaussian line integral", [] {
        double worst = 0.0, lib_secs = 0.0;
        for (double a : {0.25, 1.0, 4.0})
            for (cplx b : {cplx(0, 0), cplx(1, 0), cplx(-1, 0), cplx(0, 2), cplx(0, -2), cplx(1, 1)}) {
                const auto t0 = std::chrono::steady_clock::now();
                const cplx got = gaussian_line_integral(a, b);
                lib_secs += seconds_since(t0);
                const auto want = line_oracle(a, {b.real(), b.imag()});
                const cplx w(static_cast<double>(want.real()), static_cast<double>(want.imag()));
                worst = std::max(worst, std::abs(got - w) / std::abs(w));
            }
        return Outcome{worst <= 1e-8 && lib_secs < 1.0,
                       "max rel error " + fmt("%.2e", worst) + " over 18 points, " + fmt("%.2e", lib_secs) + " s"};
    });

    criterion(2, "power-sum maximum", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double slack = INFINITY;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const PowerSumInstance inst = random_power_sum_instance(seed);
            const CasselsResult r = cassels_max(inst, 1024);
            slack = std::min(slack, r.value - inst.k);
        }
        const double secs = seconds_since(t0);
        return Outcome{slack >= -1e-6 && secs < 10.0, "min (max - k) = " + fmt("%.4g", slack) + " over 200 instances"};
    });

    criterion(3, "Gibbs constant", [] {
        const auto t0 = std::chrono::steady_clock::now();
        SinePolynomial p = consecutive_polynomial(500);
        const double n = sup_norm(p, min_certification_grid(p));
        const double secs = seconds_since(t0);
        return Outcome{std::abs(n - 1.8519) <= 0.02 && secs < 5.0, "sup norm " + fmt("%.6f", n)};
    });

    criterion(4, "low-norm sine polynomial", [] {
        const SearchResult r = search_low_norm(0.25, SearchStrategy::smooth, 1, 1000000);
        const bool ok = r.success && r.best.certified_norm && *r.best.certified_norm <= kPi / 2 + 0.25 &&
                        r.evaluations <= 1000000;
        return Outcome{ok, serialize(r.best) + ", " + std::to_string(r.evaluations) + " evaluations"};
    });

    criterion(5, "sampler contract", [] {
        const std::vector<std::pair<double, std::vector<Zero>>> configs{
            {0.55, {{0.7, 3.0, 1}, {0.65, 8.0, 1}}},
            {0.6, {{0.75, 5.0, 1}, {0.7, 9.0, 1}, {0.8, 14.0, 1}}},
            {0.75, {{0.8, 4.0, 1}, {0.78, 7.0, 1}, {0.8, 11.0, 1}, {0.77, 17.0, 1}}},
        };
        bool ok = true;
        std::string detail;
        for (const auto& [r, z] : configs) {
            const auto t0 = std::chrono::steady_clock::now();
            const TargetDensity d(r, ZeroSpec(z));
            for (SamplerMethod m : {SamplerMethod::quantile, SamplerMethod::dmv_random}) {
                const PrimeSystem ps = sample_primes(d, m, 11, 1e7);
                const double dev = max_count_deviation(ps, d);
                ok = ok && dev <= 2.0;
                detail += (detail.empty() ? "" : ", ") + fmt("r=%.2f ", r) + to_string(m) + " " + fmt("%.3f", dev);
            }
            const double secs = seconds_since(t0);
            ok = ok && secs < 120.0;
            detail += fmt(" (%.0f s)", secs);
        }
        return Outcome{ok, "max |pi - F|: " + detail};
    });

    criterion(6, "enumeration oracle and throughput", [] {
        std::mt19937_64 gen(6);
        std::uniform_real_distribution<double> P(1.05, 40.0), LX(1.0, 4.0);
        std::uniform_int_distribution<int> K(1, 6);
        int mismatches = 0;
        for (int t = 0; t < 50; ++t) {
            std::vector<double> p(K(gen));
            for (double& q : p) q = P(gen);
            std::sort(p.begin(), p.end());
            const double X = std::pow(10.0, LX(gen));
            std::vector<double> want;
            brute(p, 0, 1.0, X, want);
            std::sort(want.begin(), want.end());
            const auto got = enumerate_norms(p, X, EnumMode::collect).norms;
            bool same = got.size() == want.size();
            for (std::size_t i = 0; same && i < got.size(); ++i)
                same = std::abs(got[i] - want[i]) <= 1e-12 * want[i];
            mismatches += !same;
        }
        const PrimeSystem& ps = reference_system();
        std::uint64_t seen = 0;
        const auto t0 = std::chrono::steady_clock::now();
        enumerate_norms(ps, 1e7, EnumMode::stream, {}, [&](double) { return ++seen < 10000000; });
        const double secs = seconds_since(t0);
        return Outcome{mismatches == 0 && seen == 10000000 && secs < 60.0,
                       std::to_string(mismatches) + " mismatches in 50 systems; " + std::to_string(seen) +
                           " norms streamed in " + fmt("%.1f", secs) + " s"};
    });

    criterion(7, "RvM residual decades", [] {
        const SystemPsiModel model(reference_system());
        const auto dec = rvm_decade_scan(model, reference_density(), 1e2, 1e7);
        bool monotone = true;
        std::string detail = "max/sqrt(x) per decade:";
        for (std::size_t i = 0; i < dec.size(); ++i) {
            detail += " " + fmt("%.3f", dec[i].max_over_sqrt);
            if (i >= 2 && dec[i].max_over_sqrt > dec[i - 1].max_over_sqrt) monotone = false;
        }
        detail += "; with smooth terms removed:";
        for (const auto& d : dec) detail += " " + fmt("%.3f", d.corrected_over_sqrt);
        return Outcome{monotone, detail};
    });

    criterion(8, "Axiom A fit", [] {
        const auto grid = geometric_grid(2.0, 1e7, 1.1);
        const IntegerCounts c = count_norms_on_grid(reference_system().primes, grid, 4'000'000'000ULL);
        const AxiomFit f = axiom_a_fit(c);
        return Outcome{f.theta_hat >= 0.55 && f.theta_hat <= 0.65 && f.kappa_hat > 0.0,
                       "theta_hat " + fmt("%.4f", f.theta_hat) + ", kappa_hat " + fmt("%.4f", f.kappa_hat)};
    });

    criterion(9, "weighted integral identity", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const TargetDensity& d = reference_density();
        const SystemPsiModel model(reference_system(), &d);
        const cplx rho0(0.75, 5.0);
        bool ok = true;
        std::string detail;
        for (double m : {2.0, 3.0}) {
            const UResult s = s_pair(model, rho0, m);
            const ResidueSide rs = residue_side(d, rho0, m);
            const double gap = std::abs(s.value - rs.with_poles());
            const double tol = s.quad_error + s.tail_bound + 4.0 * std::exp(-2.0 * m) +
                               std::exp(-3.0 * m * (rho0.real() - d.r()));
            ok = ok && gap <= tol;
            detail += fmt("m=%.0f ", m) + "gap " + fmt("%.2e", gap) + " tol " + fmt("%.2e", tol) + "; ";
        }
        const double secs = seconds_since(t0);
        return Outcome{ok && secs < 300.0, detail + fmt("%.1f s", secs)};
    });

    criterion(10, "interference headline", [&] {
        ExperimentConfig c;
        c.r = 0.6;
        c.zeros = ZeroSpec({{0.75, 5.0, 1}});
        c.M = 1;
        c.x_max = c.X_cut = 1e7;
        c.interference = InterferenceConfig{};
        RunOptions o;
        o.out_dir = (scratch / "interference").string();
        std::ostringstream log;
        const int code = run("interference", c, o, log);
        const auto kv = read_summary(fs::path(*o.out_dir) / "interference_summary.txt");
        if (!kv.count("measured") || !kv.count("baseline_measured"))
            return Outcome{false, "pipeline exit " + std::to_string(code) + ", no summary"};
        const double measured = std::stod(kv.at("measured"));
        const double baseline = std::stod(kv.at("baseline_measured"));
        const double bound = kPi / 2 + 3 * 0.2;
        return Outcome{measured <= bound && baseline >= 1.9,
                       "measured " + fmt("%.4f", measured) + " vs bound " + fmt("%.4f", bound) + ", baseline " +
                           fmt("%.4f", baseline) + " (without x^r/r + 2M sqrt x: " +
                           kv.at("measured_without_nuisance") + ", " +
                           kv.at("baseline_measured_without_nuisance") + "); finite window [1e3, 1e7] only"};
    });

    criterion(11, "reproducibility", [&] {
        ExperimentConfig c;
        c.zeros = ZeroSpec({{0.75, 5.0, 1}});
        c.M = 1;
        c.seed = 5;
        c.x_max = c.X_cut = 1e5;
        c.oscillation = OscillationConfig{};
        c.oscillation->Y = 10.0;
        std::vector<fs::path> dirs{scratch / "rep_a", scratch / "rep_b"};
        std::ostringstream log;
        for (const auto& dir : dirs) {
            RunOptions o;
            o.out_dir = dir.string();
            for (const char* sub : {"build", "tables", "rvm-check", "oscillation"}) run(sub, c, o, log);
        }
        int compared = 0, differing = 0;
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            if (e.path().extension() != ".csv") continue;
            ++compared;
            differing += slurp(e.path()) != slurp(dirs[1] / e.path().filename());
        }
        return Outcome{compared >= 4 && differing == 0,
                       std::to_string(compared) + " CSV files compared, " + std::to_string(differing) + " differ"};
    });

    fs::remove_all(scratch);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
