#include "beurling/sine_polynomial.hpp"

#include "beurling/quadrature.hpp"
#include "beurling/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace beurling {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr int kGoldenIterations = 60;

double abs_eval(const SinePolynomial& p, double y) { return std::abs(eval(p, y)); }

double golden_max_abs(const SinePolynomial& p, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = abs_eval(p, x1), f2 = abs_eval(p, x2);
    for (int it = 0; it < kGoldenIterations; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = abs_eval(p, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = abs_eval(p, x1);
        }
    }
    return std::max(f1, f2);
}

bool is_smooth(std::int64_t m, std::int64_t P) {
    for (std::int64_t q = 3; q * q <= m; q += 2) {
        while (m % q == 0) {
            if (q > P) return false;
            m /= q;
        }
    }
    return m == 1 || m <= P;
}

}  // namespace

void SinePolynomial::validate() const {
    if (indices.empty() || indices.front() != 0)
        throw std::invalid_argument("SinePolynomial: indices must start with n_0 = 0");
    for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i] <= indices[i - 1])
            throw std::invalid_argument("SinePolynomial: indices must be strictly increasing");
    }
}

double eval(const SinePolynomial& poly, double y) {
    CompensatedSum<double> s;
    for (std::int64_t n : poly.indices) {
        const double f = static_cast<double>(2 * n + 1);
        s.add(std::sin(f * y) / f);
    }
    return 2.0 * s.value();
}

std::int64_t min_certification_grid(const SinePolynomial& poly) { return 16 * poly.top_frequency(); }

std::int64_t certification_cost(const SinePolynomial& poly, std::int64_t grid) {
    (void)poly;
    // Grid points plus golden-section work for a handful of candidate peaks.
    return grid + 8 * (kGoldenIterations + 2);
}

double sup_norm(SinePolynomial& poly, std::int64_t grid) {
    poly.validate();
    const std::int64_t need = min_certification_grid(poly);
    if (grid < need) {
        throw std::invalid_argument("sup_norm: grid of " + std::to_string(grid) +
                                    " points is too coarse; top frequency " +
                                    std::to_string(poly.top_frequency()) + " needs at least " +
                                    std::to_string(need));
    }
    const double h = kHalfPi / static_cast<double>(grid - 1);
    std::vector<double> v(static_cast<std::size_t>(grid));
    double gmax = 0.0;
    for (std::int64_t i = 0; i < grid; ++i) {
        v[i] = abs_eval(poly, i == grid - 1 ? kHalfPi : i * h);
        gmax = std::max(gmax, v[i]);
    }
    // |S''| <= 2 sum (2n+1); a peak can exceed its best grid neighbour by at most
    // that bound times h^2/8, so every local maximum within the margin is refined.
    double curv = 0.0;
    for (std::int64_t n : poly.indices) curv += 2.0 * static_cast<double>(2 * n + 1);
    const double margin = curv * h * h / 8.0;
    double best = gmax;
    for (std::int64_t i = 0; i < grid; ++i) {
        const bool lo = i == 0 || v[i] >= v[i - 1];
        const bool hi = i == grid - 1 || v[i] >= v[i + 1];
        if (!(lo && hi) || v[i] < gmax - margin) continue;
        const double a = std::max(0.0, (i - 1) * h);
        const double b = std::min(kHalfPi, (i + 1) * h);
        best = std::max(best, golden_max_abs(poly, a, b));
    }
    poly.certified_norm = best;
    poly.certification_grid = grid;
    return best;
}

SinePolynomial smooth_index_polynomial(std::int64_t P, std::int64_t N) {
    if (P < 3) throw std::invalid_argument("smooth_index_polynomial: P must be >= 3");
    if (N < 1) throw std::invalid_argument("smooth_index_polynomial: N must be >= 1");
    SinePolynomial p;
    p.indices.clear();
    for (std::int64_t m = 1; m <= 2 * N + 1; m += 2) {
        if (is_smooth(m, P)) p.indices.push_back((m - 1) / 2);
    }
    return p;
}

SinePolynomial consecutive_polynomial(std::int64_t terms) {
    if (terms < 1) throw std::invalid_argument("consecutive_polynomial: need at least one term");
    SinePolynomial p;
    p.indices.resize(static_cast<std::size_t>(terms));
    for (std::int64_t i = 0; i < terms; ++i) p.indices[i] = i;
    return p;
}

namespace {

struct Budget {
    std::int64_t limit;
    std::int64_t used = 0;
    bool charge(std::int64_t cost) {
        if (used + cost > limit) return false;
        used += cost;
        return true;
    }
};

SearchResult search_smooth(double target, Budget& budget) {
    SearchResult res;
    std::set<std::vector<std::int64_t>> seen;
    for (std::int64_t m = 3;; m += 2) {
        for (std::int64_t P = 3; P <= std::min<std::int64_t>(m, 97); P += 2) {
            if (is_smooth(P, P - 1)) continue;  // composite P
            SinePolynomial poly = smooth_index_polynomial(P, (m - 1) / 2);
            if (poly.indices.back() != (m - 1) / 2) continue;  // cutoff not attained
            if (!seen.insert(poly.indices).second) continue;
            const std::int64_t grid = min_certification_grid(poly);
            if (!budget.charge(certification_cost(poly, grid))) {
                res.message = "evaluation budget exhausted";
                return res;
            }
            const double norm = sup_norm(poly, grid);
            if (!res.best.certified_norm || norm < res.best_norm) {
                res.best = poly;
                res.best_norm = norm;
            }
            if (norm <= target) {
                res.success = true;
                return res;
            }
        }
    }
}

SearchResult search_anneal(double target, std::uint64_t seed, Budget& budget) {
    constexpr std::int64_t kMaxFrequency = 65;
    SearchResult res;
    Rng rng(seed);
    std::vector<bool> on(kMaxFrequency / 2 + 1, false);
    on[0] = true;
    on[1] = true;
    auto build = [&]() {
        SinePolynomial p;
        p.indices.clear();
        for (std::size_t i = 0; i < on.size(); ++i)
            if (on[i]) p.indices.push_back(static_cast<std::int64_t>(i));
        return p;
    };
    auto score = [&](SinePolynomial& p, double& out) {
        const std::int64_t grid = min_certification_grid(p);
        if (!budget.charge(certification_cost(p, grid))) return false;
        out = sup_norm(p, grid);
        return true;
    };
    SinePolynomial cur = build();
    double cur_norm = 0.0;
    if (!score(cur, cur_norm)) {
        res.message = "evaluation budget exhausted";
        return res;
    }
    res.best = cur;
    res.best_norm = cur_norm;
    double temperature = 0.05;
    while (res.best_norm > target) {
        const std::size_t flip = 1 + static_cast<std::size_t>(rng.below(on.size() - 1));
        on[flip] = !on[flip];
        SinePolynomial cand = build();
        double cand_norm = 0.0;
        if (!score(cand, cand_norm)) {
            res.message = "evaluation budget exhausted";
            return res;
        }
        const double u = rng.uniform();
        if (cand_norm <= cur_norm || u < std::exp(-(cand_norm - cur_norm) / temperature)) {
            cur = cand;
            cur_norm = cand_norm;
            if (cur_norm < res.best_norm) {
                res.best = cur;
                res.best_norm = cur_norm;
            }
        } else {
            on[flip] = !on[flip];
        }
        temperature = std::max(1e-6, temperature * 0.995);
    }
    res.success = true;
    return res;
}

}  // namespace

SearchResult search_low_norm(double epsilon, SearchStrategy strategy, std::uint64_t seed,
                             std::int64_t budget) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("search_low_norm: epsilon must lie in (0, 0.5)");
    if (budget < 0) throw std::invalid_argument("search_low_norm: budget must be nonnegative");
    const double target = kHalfPi + epsilon;
    Budget b{budget};
    SearchResult res =
        strategy == SearchStrategy::smooth ? search_smooth(target, b) : search_anneal(target, seed, b);
    res.evaluations = b.used;
    if (res.success) {
        res.message = "certified norm within pi/2 + epsilon";
    } else if (!res.best.certified_norm) {
        res.message = "evaluation budget exhausted before any certification";
    }
    return res;
}

std::string serialize(const SinePolynomial& poly) {
    std::string out = "indices=";
    for (std::size_t i = 0; i < poly.indices.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(poly.indices[i]);
    }
    out += "; norm=";
    if (poly.certified_norm) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *poly.certified_norm);
        out += buf;
    } else {
        out += "none";
    }
    out += "; grid=" + std::to_string(poly.certification_grid);
    return out;
}

SinePolynomial parse_sine_polynomial(const std::string& line) {
    SinePolynomial p;
    p.indices.clear();
    std::stringstream ss(line);
    std::string field;
    bool have_idx = false, have_norm = false, have_grid = false;
    while (std::getline(ss, field, ';')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("sine record: missing '=' in " + field);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r\n");
            const auto b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(field.substr(0, eq));
        const std::string val = trim(field.substr(eq + 1));
        if (key == "indices") {
            std::stringstream vs(val);
            std::string tok;
            while (std::getline(vs, tok, ',')) p.indices.push_back(std::stoll(trim(tok)));
            have_idx = true;
        } else if (key == "norm") {
            if (val != "none") p.certified_norm = std::stod(val);
            have_norm = true;
        } else if (key == "grid") {
            p.certification_grid = std::stoll(val);
            have_grid = true;
        } else {
            throw std::invalid_argument("sine record: unknown field " + key);
        }
    }
    if (!have_idx || !have_norm || !have_grid) throw std::invalid_argument("sine record: incomplete");
    p.validate();
    return p;
}

std::string to_string(SearchStrategy s) { return s == SearchStrategy::smooth ? "smooth" : "anneal"; }

SearchStrategy parse_strategy(const std::string& s) {
    if (s == "smooth") return SearchStrategy::smooth;
    if (s == "anneal") return SearchStrategy::anneal;
    throw std::invalid_argument("unknown sine search strategy '" + s + "' (expected smooth or anneal)");
}

}  // namespace beurling
