#include "beurling/semigroup.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <queue>

namespace beurling {

namespace {

// Drift of a product of d factors is about d * 2^-53; past 2^-40 switch to
// extended precision.
constexpr double kDepthForExtended = 8192.0;

std::uint64_t bits_of(double x) { return std::bit_cast<std::uint64_t>(x); }

constexpr int kCellShift = 40;

// Maps a norm g >= 1 to the index of the first grid point >= g.
class GridBinner {
public:
    explicit GridBinner(const std::vector<double>& grid) : grid_(grid) {
        if (grid_.empty()) return;
        const double top = grid_.back();
        if (!(top >= 1.0)) {
            cells_ = 0;
            return;
        }
        base_ = bits_of(1.0);
        cells_ = ((bits_of(top) - base_) >> kCellShift) + 2;
        lo_.resize(cells_);
        hi_.resize(cells_);
        for (std::uint64_t c = 0; c < cells_; ++c) {
            const double a = std::bit_cast<double>(base_ + (c << kCellShift));
            const double b = std::bit_cast<double>(base_ + ((c + 1) << kCellShift));
            lo_[c] = static_cast<std::uint32_t>(std::lower_bound(grid_.begin(), grid_.end(), a) - grid_.begin());
            hi_[c] = static_cast<std::uint32_t>(std::lower_bound(grid_.begin(), grid_.end(), b) - grid_.begin());
        }
    }

    std::size_t bin(double g) const {
        const std::uint64_t c = (bits_of(g) - base_) >> kCellShift;
        if (c >= cells_) return grid_.size();
        if (lo_[c] == hi_[c]) return lo_[c];
        return static_cast<std::size_t>(
            std::lower_bound(grid_.begin() + lo_[c], grid_.begin() + hi_[c], g) - grid_.begin());
    }

private:
    const std::vector<double>& grid_;
    std::uint64_t base_ = 0;
    std::uint64_t cells_ = 0;
    std::vector<std::uint32_t> lo_, hi_;
};

void check_primes(const std::vector<double>& primes) {
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (!(primes[i] > 1.0) || !std::isfinite(primes[i]))
            throw std::invalid_argument("semigroup: every prime must be finite and > 1");
        if (i && primes[i] < primes[i - 1])
            throw std::invalid_argument("semigroup: primes must be sorted ascending");
    }
}

void check_grid(const std::vector<double>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("semigroup: grid must increase strictly");
    }
}

template <class Acc>
struct HeapState {
    Acc g;
    Acc h;
    std::uint32_t i;
    bool operator>(const HeapState& o) const { return g > o.g || (g == o.g && i > o.i); }
};

template <class Acc, class Emit>
bool heap_enumerate(const std::vector<double>& p, double X, Emit&& emit) {
    if (!emit(1.0)) return false;
    if (p.empty() || p[0] > X) return true;
    using S = HeapState<Acc>;
    std::priority_queue<S, std::vector<S>, std::greater<S>> heap;
    const Acc Xa = static_cast<Acc>(X);
    heap.push({static_cast<Acc>(p[0]), Acc(1), 0});
    while (!heap.empty()) {
        const S s = heap.top();
        heap.pop();
        if (!emit(static_cast<double>(s.g))) return false;
        const Acc child = s.g * static_cast<Acc>(p[s.i]);
        if (child <= Xa) heap.push({child, s.g, s.i});
        if (s.i + 1 < p.size()) {
            const Acc sib = s.h * static_cast<Acc>(p[s.i + 1]);
            if (sib <= Xa) heap.push({sib, s.h, s.i + 1});
        }
    }
    return true;
}

template <class Acc, class Visit>
void dfs_enumerate(const std::vector<double>& p, double X, Visit&& visit) {
    visit(1.0);
    struct Frame {
        Acc h;
        std::uint32_t j;
    };
    std::vector<Frame> stack;
    if (!p.empty()) stack.push_back({Acc(1), 0});
    const Acc Xa = static_cast<Acc>(X);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.j >= p.size()) {
            stack.pop_back();
            continue;
        }
        const Acc g = f.h * static_cast<Acc>(p[f.j]);
        if (g > Xa) {
            stack.pop_back();
            continue;
        }
        const std::uint32_t j = f.j;
        ++f.j;
        visit(static_cast<double>(g));
        stack.push_back({g, j});
    }
}

bool needs_extended(const std::vector<double>& p, double X) {
    return !p.empty() && X > 1.0 && std::log(X) / std::log(p[0]) > kDepthForExtended;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
    if (!(lo > 0.0 && hi >= lo && ratio > 1.0))
        throw std::invalid_argument("geometric_grid: need 0 < lo <= hi and ratio > 1");
    std::vector<double> g;
    const double steps = std::floor(std::log(hi / lo) / std::log(ratio) + 1e-12);
    for (std::int64_t k = 0; k <= static_cast<std::int64_t>(steps); ++k) {
        const double x = lo * std::pow(ratio, static_cast<double>(k));
        if (x < hi * (1.0 - 1e-12)) g.push_back(x);
    }
    g.push_back(hi);
    return g;
}

IntegerCounts count_norms_on_grid(const std::vector<double>& primes, const std::vector<double>& grid,
                                  std::uint64_t limit) {
    check_primes(primes);
    check_grid(grid);
    IntegerCounts out;
    out.grid = grid;
    out.N_values.assign(grid.size(), 0);
    if (grid.empty()) return out;
    out.X_cut = grid.back();
    GridBinner binner(grid);
    std::vector<std::uint64_t> hist(grid.size() + 1, 0);
    std::uint64_t visited = 0;
    auto visit = [&](double g) {
        if (++visited > limit)
            throw ResourceError("count_norms: more than " + std::to_string(limit) + " products below the cutoff");
        ++hist[binner.bin(g)];
    };
    if (needs_extended(primes, grid.back()))
        dfs_enumerate<long double>(primes, grid.back(), visit);
    else
        dfs_enumerate<double>(primes, grid.back(), visit);
    std::uint64_t run = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        run += hist[k];
        out.N_values[k] = run;
    }
    return out;
}

std::uint64_t count_norms(const std::vector<double>& primes, double X, std::uint64_t limit) {
    if (!(X >= 1.0)) return 0;
    return count_norms_on_grid(primes, {X}, limit).N_values[0];
}

EnumerationResult enumerate_norms(const std::vector<double>& primes, double X, EnumMode mode,
                                  const std::vector<double>& grid, const NormConsumer& consumer,
                                  std::size_t memory_budget_bytes) {
    check_primes(primes);
    check_grid(grid);
    if (!(X >= 1.0)) throw std::invalid_argument("enumerate_norms: X must be >= 1");
    EnumerationResult res;
    res.counts.grid = grid;
    res.counts.X_cut = X;
    res.counts.N_values.assign(grid.size(), 0);
    if (mode == EnumMode::collect) {
        const std::uint64_t cap = memory_budget_bytes / sizeof(double);
        try {
            res.norms.reserve(count_norms(primes, X, cap));
        } catch (const ResourceError&) {
            throw ResourceError("enumerate_norms: collect mode would exceed the memory budget of " +
                                std::to_string(memory_budget_bytes) + " bytes; use stream mode");
        }
    }
    std::size_t gi = 0;
    std::uint64_t below = 0;
    auto emit = [&](double g) {
        while (gi < grid.size() && grid[gi] < g) res.counts.N_values[gi++] = below;
        ++below;
        ++res.emitted;
        if (mode == EnumMode::collect) res.norms.push_back(g);
        if (consumer && !consumer(g)) return false;
        return true;
    };
    const bool complete = needs_extended(primes, X) ? heap_enumerate<long double>(primes, X, emit)
                                                    : heap_enumerate<double>(primes, X, emit);
    res.stopped_early = !complete;
    // After an early stop the remaining grid points hold the running total.
    while (gi < grid.size()) res.counts.N_values[gi++] = below;
    return res;
}

EnumerationResult enumerate_norms(const PrimeSystem& ps, double X, EnumMode mode,
                                  const std::vector<double>& grid, const NormConsumer& consumer,
                                  std::size_t memory_budget_bytes) {
    std::vector<double> usable(ps.primes.begin(),
                               std::upper_bound(ps.primes.begin(), ps.primes.end(), X));
    if (X > ps.x_max && X > ps.x_max * ps.x_max)
        throw std::domain_error("enumerate_norms: X exceeds x_max^2");
    return enumerate_norms(usable, X, mode, grid, consumer, memory_budget_bytes);
}

AxiomFit axiom_a_fit(const IntegerCounts& counts) {
    const auto& x = counts.grid;
    const auto& N = counts.N_values;
    if (x.size() != N.size() || x.size() < 8)
        throw std::invalid_argument("axiom_a_fit: need at least 8 grid points with counts");
    if (!(x.front() > 0.0) || x.back() / x.front() < 1000.0 * (1.0 - 1e-9))
        throw std::invalid_argument("axiom_a_fit: grid must span at least three decades");
    const double top = x.back();
    const double lo = top / 1000.0;
    std::vector<std::size_t> win;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo * (1.0 - 1e-12)) win.push_back(i);

    // Variable projection over theta: weighted LS of N ~ kappa (x-1) + c x^theta.
    double best_ssr = INFINITY, best_kappa = 0.0;
    for (int k = 10; k <= 190; ++k) {
        const double th = 0.005 * k;
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0, nn = 0;
        for (std::size_t i : win) {
            const double w = 1.0 / x[i];  // squared weight 1/sqrt(x)
            const double f1 = x[i] - 1.0, f2 = std::pow(x[i], th), y = static_cast<double>(N[i]);
            a11 += w * f1 * f1;
            a12 += w * f1 * f2;
            a22 += w * f2 * f2;
            b1 += w * f1 * y;
            b2 += w * f2 * y;
            nn += w * y * y;
        }
        const double det = a11 * a22 - a12 * a12;
        if (!(std::abs(det) > 1e-300)) continue;
        const double kap = (b1 * a22 - b2 * a12) / det;
        const double c = (a11 * b2 - a12 * b1) / det;
        const double ssr = nn - kap * b1 - c * b2;
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_kappa = kap;
        }
    }
    AxiomFit fit;
    fit.kappa_hat = best_kappa;
    fit.residual.resize(x.size());
    double maxR = 0.0, maxN = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residual[i] = static_cast<double>(N[i]) - fit.kappa_hat * (x[i] - 1.0);
        maxR = std::max(maxR, std::abs(fit.residual[i]));
        maxN = std::max(maxN, static_cast<double>(N[i]));
    }
    if (maxR <= 1e-9 * std::max(1.0, maxN)) {
        fit.degenerate = true;
        fit.theta_hat = 0.0;
        fit.A_hat = maxR;
        return fit;
    }
    // Upper envelope: per half-decade maxima of |R| over the top three decades.
    std::vector<double> lx, ly;
    for (int j = 0; j < 6; ++j) {
        const double a = lo * std::pow(10.0, 0.5 * j), b = lo * std::pow(10.0, 0.5 * (j + 1));
        double m = 0.0, at = 0.0;
        for (std::size_t i : win) {
            const bool inside = x[i] >= a * (1.0 - 1e-12) && (j == 5 ? x[i] <= b * (1.0 + 1e-12) : x[i] < b);
            if (inside && std::abs(fit.residual[i]) > m) {
                m = std::abs(fit.residual[i]);
                at = x[i];
            }
        }
        if (m > 0.0) {
            lx.push_back(std::log(at));
            ly.push_back(std::log(m));
        }
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        fit.theta_hat = sxx > 0 ? sxy / sxx : 0.0;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.A_hat = std::max(fit.A_hat, std::abs(fit.residual[i]) / std::pow(x[i], fit.theta_hat));
    return fit;
}

}  // namespace beurling
