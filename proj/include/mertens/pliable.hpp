#pragma once

// Exact counts of y-pliable integers in a progression: Phi(x, y; q, a) is the
// number of n <= x all of whose prime factors exceed y and are congruent to
// a mod q. The count is compared against the predicted size
//
//   x (log x)^{1/phi(q) - 1} * G(q,a) / Gamma(1/phi(q))
//     * prod_{p <= y, p = a mod q} (1 - 1/p),
//
// whose relative error envelope is (log log x)^{A+3} / log x.

#include <cstdint>
#include <vector>

#include "mertens/ap_constants.hpp"
#include "mertens/sieve.hpp"

namespace mertens::pliable {

// Whether n = 1 belongs to the counted set. The defining condition ("every
// prime factor exceeds y and lies in the progression") is vacuously true for
// an empty factorization, so 1 is counted; flip this to exclude it.
inline constexpr std::uint64_t kCountForUnit = 1;

// Default exponent A in the error envelope (log log x)^{A+3} / log x.
inline constexpr double kDefaultEnvelopeA = 1.0;

struct PliableQuery {
    std::uint64_t x;
    double y;
    sieve::APTarget target;

    // Requires x >= 1 and y >= 1. y > x is allowed (the count is then 1).
    PliableQuery(std::uint64_t x, double y, sieve::APTarget target);
};

// Exact value of Phi(x, y; q, a), by depth-first multiplication over the
// admissible primes (p > y, p = a mod q) in increasing order. Requires
// x <= table.limit().
std::uint64_t phi_count(const sieve::PrimeTable& table,
                        const PliableQuery& query);

// Counts at several thresholds in one pass: element k is Phi(xs[k], y; q, a)
// with (y, q, a) taken from the query. xs must be nonempty, ascending, and
// bounded by table.limit(); query.x is ignored.
std::vector<std::uint64_t> phi_count_grid(const sieve::PrimeTable& table,
                                          const PliableQuery& query,
                                          const std::vector<double>& xs);

// Predicted size of Phi(x, y; q, a); see the header comment. Requires x >= 3
// (below that log log x degenerates) and constants for the same progression.
double main_term(const sieve::PrimeTable& table, const PliableQuery& query,
                 const ap::APConstants& constants);

struct PliableRow {
    PliableQuery query;
    std::uint64_t exact = 0;
    double main_term = 0.0;
    double ratio = 0.0;     // exact / main_term
    double envelope = 0.0;  // (log log x)^{A+3} / log x
};

// Evaluates exact count, prediction, and envelope for each query. The
// calculator supplies G(q,a) with prime-power corrections cut at
// correction_cutoff.
std::vector<PliableRow> pliable_report(const sieve::PrimeTable& table,
                                       const std::vector<PliableQuery>& queries,
                                       ap::ConstantsCalculator& calculator,
                                       std::uint64_t correction_cutoff,
                                       double envelope_a = kDefaultEnvelopeA);

}  // namespace mertens::pliable
