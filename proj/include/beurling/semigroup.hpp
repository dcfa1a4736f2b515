// Enumeration of the free commutative semigroup generated by a prime system,
// integer counts N(x), and the Axiom A fit.
#pragma once

#include "beurling/prime_sampler.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace beurling {

enum class EnumMode { stream, collect };

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntegerCounts {
    std::vector<double> grid;
    std::vector<std::uint64_t> N_values;
    double X_cut = 0.0;
};

// Returning false from the consumer stops the stream early.
using NormConsumer = std::function<bool(double)>;

struct EnumerationResult {
    IntegerCounts counts;           // N on the requested grid
    std::vector<double> norms;      // collect mode only
    std::uint64_t emitted = 0;      // norms delivered (stream) or stored (collect)
    bool stopped_early = false;
};

constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

// Ascending enumeration of all products <= X (the empty product 1 first).
// Collect mode refuses with ResourceError when the count exceeds the budget.
EnumerationResult enumerate_norms(const std::vector<double>& primes, double X, EnumMode mode,
                                  const std::vector<double>& grid = {},
                                  const NormConsumer& consumer = {},
                                  std::size_t memory_budget_bytes = kDefaultMemoryBudget);

EnumerationResult enumerate_norms(const PrimeSystem& ps, double X, EnumMode mode,
                                  const std::vector<double>& grid = {},
                                  const NormConsumer& consumer = {},
                                  std::size_t memory_budget_bytes = kDefaultMemoryBudget);

// Exact N(x) on a sorted grid by depth-first counting (no ordering needed).
// Stops with ResourceError once more than `limit` products have been visited.
IntegerCounts count_norms_on_grid(const std::vector<double>& primes, const std::vector<double>& grid,
                                  std::uint64_t limit = UINT64_MAX);

std::uint64_t count_norms(const std::vector<double>& primes, double X, std::uint64_t limit = UINT64_MAX);

// Geometric grid from lo to hi with the given ratio; hi is always the last point.
std::vector<double> geometric_grid(double lo, double hi, double ratio);

struct AxiomFit {
    double kappa_hat = 0.0;
    double theta_hat = 0.0;
    double A_hat = 0.0;
    bool degenerate = false;
    std::vector<double> residual;  // R(x) = N(x) - kappa_hat (x - 1) on the grid
};

AxiomFit axiom_a_fit(const IntegerCounts& counts);

}  // namespace beurling
