// Sparse odd-frequency sine polynomials S(y) = 2 sum sin((2n_k+1)y)/(2n_k+1)
// and certification of their sup norm.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace beurling {

struct SinePolynomial {
    std::vector<std::int64_t> indices{0};
    std::optional<double> certified_norm;
    std::int64_t certification_grid = 0;

    // Throws std::invalid_argument unless n_0 = 0 and indices strictly increase.
    void validate() const;
    std::int64_t top_frequency() const { return 2 * indices.back() + 1; }
};

double eval(const SinePolynomial& poly, double y);

// Smallest grid accepted by sup_norm.
std::int64_t min_certification_grid(const SinePolynomial& poly);

// Refined maximum of |S| on [0, pi/2]; stores it in poly.certified_norm.
double sup_norm(SinePolynomial& poly, std::int64_t grid);

// Number of point evaluations sup_norm performs for a given grid (grid plus
// refinement upper bound); used for budget accounting.
std::int64_t certification_cost(const SinePolynomial& poly, std::int64_t grid);

SinePolynomial smooth_index_polynomial(std::int64_t P, std::int64_t N);
SinePolynomial consecutive_polynomial(std::int64_t terms);

enum class SearchStrategy { smooth, anneal };

struct SearchResult {
    bool success = false;
    SinePolynomial best;
    double best_norm = 0.0;
    std::int64_t evaluations = 0;
    std::string message;
};

SearchResult search_low_norm(double epsilon, SearchStrategy strategy, std::uint64_t seed,
                             std::int64_t budget);

// `indices=<comma list>; norm=<decimal>; grid=<int>`
std::string serialize(const SinePolynomial& poly);
SinePolynomial parse_sine_polynomial(const std::string& line);

std::string to_string(SearchStrategy s);
SearchStrategy parse_strategy(const std::string& s);

}  // namespace beurling
