#include "beurling/runner.hpp"

#include "beurling/analysis_kernels.hpp"
#include "beurling/chebyshev.hpp"
#include "beurling/hash.hpp"
#include "beurling/oscillation.hpp"
#include "beurling/prime_sampler.hpp"
#include "beurling/semigroup.hpp"
#include "beurling/sine_polynomial.hpp"
#include "beurling/zeta.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace beurling {

namespace {

// Larger systems exhaust desk-scale time; count_norms reports a ResourceError.
constexpr std::uint64_t kTablesProductLimit = 4'000'000'000ULL;

class MissingArtifact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw std::runtime_error("output directory " + dir.string() + " is locked by another run (" +
                                     path_.string() + ")");
        const std::string pid = std::to_string(::getpid()) + "\n";
        if (::write(fd_, pid.data(), pid.size()) < 0) { /* pid is informational only */ }
    }
    ~DirLock() {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

struct Context {
    const ExperimentConfig& cfg;
    fs::path dir;
    std::uint64_t seed;
    int threads;
    std::ostream& log;
    std::string fingerprint;        // density fingerprint, hex
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, std::string>> extra;  // manifest lines
};

void write_text(Context& c, const std::string& name, const std::string& body) {
    std::ofstream f(c.dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (c.dir / name).string());
    f << body;
    if (!f) throw std::runtime_error("write failed for " + (c.dir / name).string());
    c.outputs.push_back(name);
}

void write_manifest(const Context& c, const std::string& sub) {
    std::ostringstream os;
    os << "subcommand = " << sub << "\n"
       << "version = " << kVersion << "\n"
       << "config_sha256 = " << config_hash(c.cfg) << "\n"
       << "seed = " << c.seed << "\n";
    if (c.cfg.sine) os << "sine_seed = " << c.cfg.sine->seed << "\n";
    os << "threads = " << c.threads << "\n";
    if (!c.fingerprint.empty()) os << "density_fingerprint = " << c.fingerprint << "\n";
    for (const auto& [k, v] : c.extra) os << k << " = " << v << "\n";
    for (const std::string& o : c.outputs) os << "output = " << o << "\n";
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "timestamp = " << stamp << "\n";
    std::ofstream f(c.dir / ("manifest-" + sub + ".txt"), std::ios::binary | std::ios::trunc);
    f << os.str();
}

std::string hex_fingerprint(const TargetDensity& d) { return to_hex(sha256(d.fingerprint_source())); }

std::unique_ptr<TargetDensity> make_density(const ExperimentConfig& cfg, const ZeroSpec& zeros) {
    return std::make_unique<TargetDensity>(cfg.r, zeros, cfg.M);
}

PrimeSystem load_system(Context& c, const TargetDensity& d) {
    const fs::path p = c.dir / "primes.bprm";
    if (!fs::exists(p))
        throw MissingArtifact("missing " + p.string() + "; run the 'build' subcommand first");
    PrimeSystem ps = read_prime_system(p.string());
    if (ps.density_fingerprint != sha256(d.fingerprint_source()))
        throw MissingArtifact(p.string() + " was built from a different density; rerun 'build'");
    const std::uint64_t want_seed = c.cfg.sampler == SamplerMethod::quantile ? 0 : c.seed;
    if (ps.seed != want_seed || ps.method != c.cfg.sampler || ps.x_max != c.cfg.x_max)
        throw MissingArtifact(p.string() + " does not match the configured sampler/seed/x_max; rerun 'build'");
    return ps;
}

// Zero with the largest real part, then the smallest positive ordinate.
cplx pick_rho0(const ZeroSpec& zeros) {
    const Zero* best = nullptr;
    for (const Zero& z : zeros.entries()) {
        if (z.gamma <= 0.0) continue;
        if (!best || z.beta > best->beta || (z.beta == best->beta && z.gamma < best->gamma)) best = &z;
    }
    if (!best) throw std::invalid_argument("zeros: need at least one zero with gamma > 0");
    return {best->beta, best->gamma};
}

std::string row(double sigma, double t, cplx v, double tail) {
    return format_double(sigma) + "," + format_double(t) + "," + format_double(v.real()) + "," +
           format_double(v.imag()) + "," + format_double(tail) + "\n";
}

int cmd_build(Context& c) {
    auto d = make_density(c.cfg, c.cfg.zeros);
    c.fingerprint = hex_fingerprint(*d);
    const PrimeSystem ps = sample_primes(*d, c.cfg.sampler, c.seed, c.cfg.x_max);
    write_prime_system((c.dir / "primes.bprm").string(), ps);
    c.outputs.push_back("primes.bprm");
    write_text(c, "primes.bprm.txt", prime_system_sidecar(ps));
    c.extra.push_back({"M", std::to_string(d->M())});
    c.log << "build: " << ps.primes.size() << " primes up to " << format_double(c.cfg.x_max) << " (M = " << d->M()
          << ")\n";
    return kPass;
}

int cmd_tables(Context& c) {
    auto d = make_density(c.cfg, c.cfg.zeros);
    c.fingerprint = hex_fingerprint(*d);
    const PrimeSystem ps = load_system(c, *d);
    const std::vector<double> grid = geometric_grid(2.0, c.cfg.X_cut, c.cfg.grid_ratio);
    SummaryTables t = chebyshev_tables(ps, grid);
    std::vector<double> small;
    for (double p : ps.primes)
        if (p <= c.cfg.X_cut) small.push_back(p);
    const IntegerCounts counts = count_norms_on_grid(small, grid, kTablesProductLimit);
    attach_counts(t, counts);
    std::ostringstream fit;
    try {
        const AxiomFit f = axiom_a_fit(counts);
        t.fit = f;
        fit << "kappa_hat = " << format_double(f.kappa_hat) << "\n"
            << "theta_hat = " << format_double(f.theta_hat) << "\n"
            << "A_hat = " << format_double(f.A_hat) << "\n"
            << "degenerate = " << (f.degenerate ? "yes" : "no") << "\n";
    } catch (const std::invalid_argument& e) {
        fit << "fit = unavailable (" << e.what() << ")\n";
    }
    write_text(c, "tables.csv", tables_csv(t));
    write_text(c, "fit.txt", fit.str());
    c.log << fit.str();
    return kPass;
}

int cmd_zeta(Context& c) {
    auto d = make_density(c.cfg, c.cfg.zeros);
    c.fingerprint = hex_fingerprint(*d);
    const PrimeSystem ps = load_system(c, *d);
    const ZetaContext z(ps, d.get(), c.cfg.X_cut, TailPolicy::estimate);
    const std::string head = "sigma,t,re,im,tail\n";
    std::string euler = head, ld = head, dfun = head, rs = head;
    for (double sigma : {1.1, 1.25, 1.5, 2.0, 3.0}) {
        for (int i = 0; i <= 80; ++i) {
            const double t = 0.5 * i;
            const cplx s(sigma, t);
            const ZetaValue e = z.zeta_euler(s);
            euler += row(sigma, t, e.value, e.tail_bound);
            const ZetaValue l = z.log_deriv(s);
            ld += row(sigma, t, l.value, l.tail_bound);
            const ZetaValue df = z.d_function(s);
            dfun += row(sigma, t, df.value, df.tail_bound);
            rs += row(sigma, t, z.rstar_empirical(s), 0.0);
        }
    }
    write_text(c, "zeta_euler.csv", euler);
    write_text(c, "log_deriv.csv", ld);
    write_text(c, "d_function.csv", dfun);
    write_text(c, "rstar.csv", rs);
    return kPass;
}

int cmd_rvm(Context& c) {
    auto d = make_density(c.cfg, c.cfg.zeros);
    c.fingerprint = hex_fingerprint(*d);
    const PrimeSystem ps = load_system(c, *d);
    const SystemPsiModel model(ps);
    const double lo = std::min(100.0, c.cfg.x_max / 10.0);
    const auto grid = geometric_grid(lo, c.cfg.x_max, c.cfg.grid_ratio);
    const RvmResult r = rvm_residual(model, d->zeros(), grid);
    std::string csv = "x,delta,rvm_residual,residual_over_sqrt\n";
    for (const RvmPoint& p : r.points)
        csv += format_double(p.x) + "," + format_double(p.delta) + "," + format_double(p.residual) + "," +
               format_double(p.residual / std::sqrt(p.x)) + "\n";
    write_text(c, "rvm.csv", csv);
    const auto decades = rvm_decade_scan(model, *d, lo, c.cfg.x_max);
    std::ostringstream sum;
    sum << "lo,hi,max_over_sqrt,corrected_over_sqrt\n";
    bool monotone = true;
    for (std::size_t i = 0; i < decades.size(); ++i) {
        const RvmDecade& q = decades[i];
        sum << format_double(q.lo) << "," << format_double(q.hi) << "," << format_double(q.max_over_sqrt) << ","
            << format_double(q.corrected_over_sqrt) << "\n";
        if (i >= 2 && q.max_over_sqrt > decades[i - 1].max_over_sqrt) monotone = false;
    }
    write_text(c, "rvm_decades.csv", sum.str());
    c.log << sum.str() << "non-increasing after the first decade: " << (monotone ? "yes" : "no") << "\n";
    return monotone ? kPass : kCheckFailure;
}

SearchResult run_search(Context& c, const SineConfig& s) {
    SearchResult res = search_low_norm(s.epsilon, s.strategy, s.seed, s.budget);
    c.log << "sine-search: " << res.message << "\n";
    return res;
}

int cmd_sine(Context& c) {
    if (!c.cfg.sine) throw std::invalid_argument("sine-search needs a [sine] section");
    const SearchResult res = run_search(c, *c.cfg.sine);
    std::ostringstream os;
    os << serialize(res.best) << "\n"
       << "best_norm = " << format_double(res.best_norm) << "\n"
       << "target = " << format_double(std::numbers::pi / 2 + c.cfg.sine->epsilon) << "\n"
       << "evaluations = " << res.evaluations << "\n"
       << "success = " << (res.success ? "yes" : "no") << "\n";
    write_text(c, "sine.txt", os.str());
    return res.success ? kPass : kCheckFailure;
}

int cmd_oscillation(Context& c) {
    const OscillationConfig oc = c.cfg.oscillation.value_or(OscillationConfig{});
    auto d = make_density(c.cfg, c.cfg.zeros);
    c.fingerprint = hex_fingerprint(*d);
    const PrimeSystem ps = load_system(c, *d);
    const cplx rho0 = pick_rho0(d->zeros());
    const bool extend = ps.method == SamplerMethod::quantile;
    const SystemPsiModel model(ps, extend ? d.get() : nullptr);
    const OscillationReport rep = verify_lower_oscillation(model, *d, rho0, oc.epsilon, oc.Y, oc.c);
    std::ostringstream sum;
    sum << "rho0 = " << format_double(rho0.real()) << " + " << format_double(rho0.imag()) << "i\n"
        << summary_text(rep);
    bool identity_ok = true;
    try {
        const UResult s = s_pair(model, rho0, oc.m);
        const ResidueSide rs = residue_side(*d, rho0, oc.m);
        const double tol = s.quad_error + s.tail_bound + 4.0 * std::exp(-2.0 * oc.m) +
                           std::exp(-3.0 * oc.m * (rho0.real() - d->r()));
        const double diff = std::abs(s.value - rs.with_poles());
        identity_ok = diff <= tol;
        sum << "m = " << format_double(oc.m) << "\n"
            << "s_pair = " << format_double(s.value.real()) << " " << format_double(s.value.imag()) << "i\n"
            << "residue_side = " << format_double(rs.with_poles().real()) << " "
            << format_double(rs.with_poles().imag()) << "i\n"
            << "residue_side_without_poles = " << format_double(rs.without_poles().real()) << " "
            << format_double(rs.without_poles().imag()) << "i\n"
            << "identity_gap = " << format_double(diff) << "\n"
            << "identity_tolerance = " << format_double(tol) << "\n"
            << "identity_pass = " << (identity_ok ? "yes" : "no") << "\n";
    } catch (const RangeError& e) {
        sum << "identity = skipped (" << e.what() << ")\n";
    }
    write_text(c, "oscillation_summary.txt", sum.str());
    const double gmax = d->zeros().max_gamma();
    write_text(c, "oscillation.csv",
               oscillation_csv(model, d->zeros(), rho0.real(), std::abs(rho0), rep.x_lo, rep.x_hi,
                               max_grid_ratio(gmax)));
    c.log << sum.str();
    return rep.pass && identity_ok ? kPass : kCheckFailure;
}

int cmd_interference(Context& c) {
    const InterferenceConfig ic = c.cfg.interference.value_or(InterferenceConfig{});
    SineConfig sc = c.cfg.sine.value_or(SineConfig{});
    if (!c.cfg.sine) sc.epsilon = ic.epsilon;
    const SearchResult sr = run_search(c, sc);
    if (!sr.success) {
        c.log << "interference: no certified polynomial within budget\n";
        return kCheckFailure;
    }
    const double N = static_cast<double>(sr.best.indices.size() - 1);
    const double v = ic.v.value_or((4.0 * N + 5.0) / ic.epsilon);
    const ZeroSpec zeros = interference_layout(sr.best, v, ic.beta0);
    // Top-level zeros and M describe the base system; the layout gets its own sharp shift.
    const TargetDensity d(c.cfg.r, zeros, std::optional<std::int64_t>(m_sharp(c.cfg.r, zeros)));
    c.fingerprint = hex_fingerprint(d);
    c.log << "interference: " << sr.best.indices.size() << " zeros, v = " << format_double(v) << ", M = " << d.M()
          << "\n";
    const PrimeSystem ps = sample_primes(d, c.cfg.sampler, c.seed, c.cfg.x_max);
    const SystemPsiModel model(ps);
    const InterferenceReport rep = verify_interference(model, d, sr.best, v, ic.beta0, ic.epsilon, ic.x_lo, ic.x_hi);

    // Single-zero baseline at the same beta0.
    SinePolynomial base;
    const double v_base = 5.0 / ic.epsilon;
    const ZeroSpec bzeros = interference_layout(base, v_base, ic.beta0);
    const TargetDensity bd(c.cfg.r, bzeros, std::optional<std::int64_t>(m_sharp(c.cfg.r, bzeros)));
    const PrimeSystem bps = sample_primes(bd, c.cfg.sampler, c.seed, c.cfg.x_max);
    const SystemPsiModel bmodel(bps);
    const InterferenceReport brep = verify_interference(bmodel, bd, base, v_base, ic.beta0, ic.epsilon, ic.x_lo, ic.x_hi);
    const bool baseline_ok = brep.measured >= 1.9;

    std::ostringstream sum;
    sum << "sine = " << serialize(sr.best) << "\n"
        << "v = " << format_double(v) << "\n"
        << "M = " << d.M() << "\n"
        << "measured = " << format_double(rep.measured) << "\n"
        << "measured_without_nuisance = " << format_double(rep.measured_corrected) << "\n"
        << "bound = " << format_double(rep.bound) << "\n"
        << "allowance = " << format_double(rep.allowance) << "\n"
        << "pass_strict = " << (rep.pass_strict ? "yes" : "no") << "\n"
        << "pass_with_allowance = " << (rep.pass_with_allowance ? "yes" : "no") << "\n"
        << "baseline_v = " << format_double(v_base) << "\n"
        << "baseline_M = " << bd.M() << "\n"
        << "baseline_measured = " << format_double(brep.measured) << "\n"
        << "baseline_measured_without_nuisance = " << format_double(brep.measured_corrected) << "\n"
        << "baseline_pass = " << (baseline_ok ? "yes" : "no") << "\n"
        << summary_text(rep.base);
    write_text(c, "interference_summary.txt", sum.str());
    const double gmax = zeros.max_gamma();
    write_text(c, "interference.csv",
               oscillation_csv(model, zeros, ic.beta0, std::abs(cplx(ic.beta0, v)), ic.x_lo, ic.x_hi,
                               max_grid_ratio(gmax)));
    write_text(c, "interference_baseline.csv",
               oscillation_csv(bmodel, bzeros, ic.beta0, std::abs(cplx(ic.beta0, v_base)), ic.x_lo, ic.x_hi,
                               max_grid_ratio(bzeros.max_gamma())));
    c.extra.push_back({"baseline_density_fingerprint", hex_fingerprint(bd)});
    c.log << sum.str();
    return rep.pass_strict && baseline_ok ? kPass : kCheckFailure;
}

int cmd_lemmas(Context& c) {
    std::ostringstream os;
    bool ok = true;
    double worst = 0.0;
    for (double a : {0.25, 1.0, 4.0}) {
        for (cplx b : {cplx(0, 0), cplx(1, 0), cplx(-1, 0), cplx(0, 2), cplx(0, -2), cplx(1, 1)}) {
            const cplx exact = gaussian_line_integral(a, b);
            const cplx num = gaussian_line_integral_numeric(a, b, 0.0);
            worst = std::max(worst, std::abs(exact - num) / std::abs(exact));
        }
    }
    ok &= worst <= 1e-8;
    os << "gaussian_line_integral max_rel_error = " << format_double(worst) << "\n";

    const EstimateReport er = verify_estimate_bounds({1.0, 2.0, 5.0, 10.0, 100.0, 1000.0});
    ok &= er.overall;
    os << "estimate_bounds points = " << er.points.size() << " flagged = " << er.flagged
       << " overall = " << (er.overall ? "pass" : "fail") << "\n";

    int cassels_fail = 0;
    double margin = INFINITY;
    for (std::uint64_t s = 1; s <= 200; ++s) {
        const PowerSumInstance inst = random_power_sum_instance(s);
        const CasselsResult r = cassels_max(inst, 4096);
        margin = std::min(margin, r.value - inst.k);
        if (r.value < inst.k - 1e-6) ++cassels_fail;
    }
    ok &= cassels_fail == 0;
    os << "cassels instances = 200 failures = " << cassels_fail << " min_margin = " << format_double(margin) << "\n";

    SinePolynomial g = consecutive_polynomial(500);
    const double gibbs = sup_norm(g, min_certification_grid(g));
    ok &= std::abs(gibbs - 1.8519) <= 0.02;
    os << "gibbs_N500 = " << format_double(gibbs) << "\n";
    os << "overall = " << (ok ? "pass" : "fail") << "\n";
    write_text(c, "lemmas.txt", os.str());
    c.log << os.str();
    return ok ? kPass : kCheckFailure;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"build",       "tables",      "zeta",         "rvm-check",
                                                "sine-search", "oscillation", "interference", "lemmas"};
    return names;
}

int run(const std::string& subcommand, const ExperimentConfig& cfg_in, const RunOptions& opts, std::ostream& log) {
    ExperimentConfig cfg = cfg_in;
    if (opts.out_dir) cfg.output_dir = *opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kUsageError;
    }
    if (opts.threads < 1) {
        log << "usage error: --threads must be positive\n";
        return kUsageError;
    }
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        log << "cannot create output directory " << dir << ": " << ec.message() << "\n";
        return kUsageError;
    }
    std::unique_ptr<DirLock> lock;
    try {
        lock = std::make_unique<DirLock>(dir);
    } catch (const std::runtime_error& e) {
        log << "error: " << e.what() << "\n";
        return kUsageError;
    }
    Context c{cfg, dir, cfg.seed, opts.threads, log, {}, {}, {}};
    try {
        int code;
        if (subcommand == "build") code = cmd_build(c);
        else if (subcommand == "tables") code = cmd_tables(c);
        else if (subcommand == "zeta") code = cmd_zeta(c);
        else if (subcommand == "rvm-check") code = cmd_rvm(c);
        else if (subcommand == "sine-search") code = cmd_sine(c);
        else if (subcommand == "oscillation") code = cmd_oscillation(c);
        else if (subcommand == "interference") code = cmd_interference(c);
        else if (subcommand == "lemmas") code = cmd_lemmas(c);
        else {
            log << "usage error: unknown subcommand '" << subcommand << "'\n";
            return kUsageError;
        }
        write_manifest(c, subcommand);
        return code;
    } catch (const MissingArtifact& e) {
        log << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const ResourceError& e) {
        log << "resource error: " << e.what() << "\n";
        return kResourceError;
    } catch (const RangeError& e) {
        log << "range error: " << e.what() << "\n";
        return kResourceError;
    } catch (const std::bad_alloc&) {
        log << "resource error: out of memory\n";
        return kResourceError;
    } catch (const QuadratureError& e) {
        log << "resource error: quadrature did not converge: " << e.what() << "\n";
        return kResourceError;
    } catch (const std::logic_error& e) {
        // invalid_argument / domain_error from module preconditions
        log << "config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kResourceError;
    }
}

}  // namespace beurling
