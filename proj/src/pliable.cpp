#include "mertens/pliable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mertens/mertens_sums.hpp"
#include "mertens/special_functions.hpp"

namespace mertens::pliable {

namespace {

// Admissible primes p <= x with p > y and p = a mod q, in increasing order.
std::vector<std::uint64_t> admissible_primes(const sieve::PrimeTable& table,
                                             std::uint64_t x, double y,
                                             const sieve::APTarget& ap) {
    std::vector<std::uint64_t> primes;
    if (x < 2) return primes;
    const std::uint64_t r = ap.a % ap.q;
    const std::uint64_t lo =
        y < 2.0 ? 2 : static_cast<std::uint64_t>(std::floor(y)) + 1;
    table.for_each_prime(lo, x, [&](std::uint64_t p) {
        if (p % ap.q == r) primes.push_back(p);
    });
    return primes;
}

// Depth-first products with nondecreasing prime index; each counted n > 1 is
// produced exactly once as p_{i1} * p_{i2} * ... with i1 <= i2 <= ... The
// visitor receives every generated n (product > 1).
template <class Visit>
void visit_products(const std::vector<std::uint64_t>& primes, std::uint64_t x,
                    std::size_t start, std::uint64_t product, Visit&& visit) {
    for (std::size_t i = start; i < primes.size(); ++i) {
        if (primes[i] > x / product) break;  // sorted: later primes overflow too
        const std::uint64_t next = product * primes[i];
        visit(next);
        visit_products(primes, x, i, next, visit);
    }
}

}  // namespace

PliableQuery::PliableQuery(std::uint64_t x_, double y_, sieve::APTarget target_)
    : x(x_), y(y_), target(target_) {
    if (x == 0) throw std::invalid_argument("pliable: x must be >= 1");
    if (!(y >= 1.0)) throw std::invalid_argument("pliable: y must be >= 1");
}

std::uint64_t phi_count(const sieve::PrimeTable& table,
                        const PliableQuery& query) {
    if (query.x > table.limit())
        throw sieve::RangeError("phi_count: x exceeds the sieve table limit");
    const auto primes =
        admissible_primes(table, query.x, query.y, query.target);
    std::uint64_t count = kCountForUnit;
    visit_products(primes, query.x, 0, 1, [&](std::uint64_t) { ++count; });
    return count;
}

std::vector<std::uint64_t> phi_count_grid(const sieve::PrimeTable& table,
                                          const PliableQuery& query,
                                          const std::vector<double>& xs) {
    if (xs.empty())
        throw std::invalid_argument("phi_count_grid: empty threshold list");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("phi_count_grid: thresholds not ascending");
    if (!(xs.front() >= 1.0))
        throw std::invalid_argument("phi_count_grid: thresholds must be >= 1");
    if (xs.back() > static_cast<double>(table.limit()))
        throw sieve::RangeError(
            "phi_count_grid: threshold exceeds the sieve table limit");

    const std::uint64_t x_max =
        static_cast<std::uint64_t>(std::floor(xs.back()));
    const auto primes = admissible_primes(table, x_max, query.y, query.target);

    // Bin each generated n into the first threshold >= n, then cumulate.
    std::vector<std::uint64_t> counts(xs.size(), 0);
    visit_products(primes, x_max, 0, 1, [&](std::uint64_t n) {
        const auto it = std::lower_bound(xs.begin(), xs.end(),
                                         static_cast<double>(n));
        ++counts[static_cast<std::size_t>(it - xs.begin())];
    });
    std::uint64_t running = kCountForUnit;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        running += counts[k];
        counts[k] = running;
    }
    return counts;
}

double main_term(const sieve::PrimeTable& table, const PliableQuery& query,
                 const ap::APConstants& constants) {
    if (query.x < 3)
        throw std::invalid_argument("main_term: x must be >= 3");
    const sieve::APTarget& ap = query.target;
    if (constants.target.q != ap.q || constants.target.a != ap.a)
        throw std::invalid_argument(
            "main_term: constants describe a different progression");
    const double phi = static_cast<double>(ap.phi());
    const double x = static_cast<double>(query.x);
    // prod_{p <= y, p = a mod q} (1 - 1/p), accumulated in log space.
    const double small_factor =
        std::exp(-sums::partial_product_log(table, query.y, ap));
    return x * std::pow(std::log(x), 1.0 / phi - 1.0) * constants.G /
           sf::gamma_fn(1.0 / phi) * small_factor;
}

std::vector<PliableRow> pliable_report(const sieve::PrimeTable& table,
                                       const std::vector<PliableQuery>& queries,
                                       ap::ConstantsCalculator& calculator,
                                       std::uint64_t correction_cutoff,
                                       double envelope_a) {
    std::vector<PliableRow> rows;
    rows.reserve(queries.size());
    for (const PliableQuery& query : queries) {
        PliableRow row{query};
        row.exact = phi_count(table, query);
        const auto constants = calculator.constants(
            query.target.q, query.target.a, correction_cutoff);
        row.main_term = main_term(table, query, constants);
        row.ratio = static_cast<double>(row.exact) / row.main_term;
        const double lx = std::log(static_cast<double>(query.x));
        row.envelope = std::pow(std::log(lx), envelope_a + 3.0) / lx;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mertens::pliable
