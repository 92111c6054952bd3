#include "mertens/mertens_sums.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mertens/numeric.hpp"
#include "mertens/special_functions.hpp"

namespace mertens::sums {

namespace {

std::uint64_t floor_checked(const sieve::PrimeTable& table, double x) {
    if (!(x >= 0.0))
        throw sieve::RangeError("x must be non-negative");
    if (x > static_cast<double>(table.limit()))
        throw sieve::RangeError("x exceeds the sieve table limit");
    return static_cast<std::uint64_t>(std::floor(x));
}

double loglog(double t) { return std::log(std::log(t)); }

}  // namespace

double partial_sum_recip(const sieve::PrimeTable& table, double x,
                         const sieve::APTarget& ap) {
    const std::uint64_t hi = floor_checked(table, x);
    num::KahanSum sum;
    if (hi >= 2) {
        const std::uint64_t r = ap.a % ap.q;
        table.for_each_prime(2, hi, [&](std::uint64_t p) {
            if (p % ap.q == r) sum.add(1.0 / static_cast<double>(p));
        });
    }
    return sum.value();
}

double partial_product_log(const sieve::PrimeTable& table, double x,
                           const sieve::APTarget& ap) {
    const std::uint64_t hi = floor_checked(table, x);
    num::KahanSum sum;
    if (hi >= 2) {
        const std::uint64_t r = ap.a % ap.q;
        table.for_each_prime(2, hi, [&](std::uint64_t p) {
            if (p % ap.q == r) sum.add(-std::log1p(-1.0 / static_cast<double>(p)));
        });
    }
    return sum.value();
}

double abel_identity_residual(const sieve::PrimeTable& table, double x,
                              const sieve::APTarget& ap) {
    const std::uint64_t hi = floor_checked(table, x);
    const double lhs = partial_sum_recip(table, x, ap);
    num::KahanSum integral;  // int_2^x t^{-2} pi(t;q,a) dt, summed exactly
    std::uint64_t count = 0;
    if (hi >= 2) {
        const std::uint64_t r = ap.a % ap.q;
        table.for_each_prime(2, hi, [&](std::uint64_t p) {
            if (p % ap.q != r) return;
            integral.add(1.0 / static_cast<double>(p) - 1.0 / x);
            ++count;
        });
    }
    const double rhs = static_cast<double>(count) / x + integral.value();
    return std::abs(lhs - rhs);
}

double error_integral(const sieve::PrimeTable& table, double X,
                      const sieve::APTarget& ap) {
    if (!(X >= 2.0)) throw sieve::RangeError("error_integral: X must be >= 2");
    const std::uint64_t hi = floor_checked(table, X);
    num::KahanSum step;  // int_2^X t^{-2} pi(t;q,a) dt
    const std::uint64_t r = ap.a % ap.q;
    table.for_each_prime(2, hi, [&](std::uint64_t p) {
        if (p % ap.q == r) step.add(1.0 / static_cast<double>(p) - 1.0 / X);
    });
    // int_2^X t^{-2} li(t) dt via the antiderivative -li(t)/t + loglog t,
    // with li(2) = 0.
    const double li_integral = -sieve::li(X) / X + loglog(X) - loglog(2.0);
    return step.value() - li_integral / static_cast<double>(ap.phi());
}

MertensRow identity_closure_report(const sieve::PrimeTable& table, double x,
                                 double X_tail, const sieve::APTarget& ap) {
    if (!(x >= 2.0) || x > X_tail)
        throw sieve::RangeError("identity_closure_report: need 2 <= x <= X_tail");
    floor_checked(table, X_tail);

    MertensRow row(x, ap);
    row.sum_recip = partial_sum_recip(table, x, ap);
    const double phi = static_cast<double>(ap.phi());
    const double prefix_tail = error_integral(table, X_tail, ap);
    // Truncated-integral surrogate for g(q,a).
    const double g_hat = prefix_tail - loglog(2.0) / phi;
    // int_x^{X_tail} t^{-2} E dt as a difference of exact prefix integrals.
    const double tail = prefix_tail - error_integral(table, x, ap);
    row.predicted_sum = loglog(x) / phi + g_hat +
                        table.error_term(x, ap) / x - tail;
    row.residual_sum = row.sum_recip - row.predicted_sum;
    return row;
}

MertensRow product_report(const sieve::PrimeTable& table, double x,
                          const sieve::APTarget& ap,
                          const ap::APConstants& constants) {
    if (!(x >= 2.0)) throw sieve::RangeError("product_report: x must be >= 2");
    if (constants.target.q != ap.q ||
        constants.target.a % ap.q != ap.a % ap.q)
        throw std::invalid_argument(
            "product_report: constants were computed for a different progression");

    MertensRow row(x, ap);
    row.sum_recip = partial_sum_recip(table, x, ap);
    row.product_log = partial_product_log(table, x, ap);
    const double phi = static_cast<double>(ap.phi());
    row.predicted_sum = loglog(x) / phi + constants.g;
    row.predicted_product_log =
        (sf::euler_gamma() + loglog(x)) / phi + std::log(constants.G);
    row.residual_sum = row.sum_recip - row.predicted_sum;
    row.residual_product = row.product_log - row.predicted_product_log;
    return row;
}

LargeModulusProbe large_modulus_probe(const sieve::PrimeTable& table, double x,
                               const sieve::APTarget& ap) {
    if (!(x >= 2.0)) throw sieve::RangeError("large_modulus_probe: x must be >= 2");
    floor_checked(table, x);

    LargeModulusProbe probe(x, ap);
    probe.sum_value = partial_sum_recip(table, x, ap);
    probe.product_value = std::exp(partial_product_log(table, x, ap));
    probe.g_star = ap::g_star(ap.q, ap.a);
    probe.G_star = ap::G_star(ap.q, ap.a);
    probe.exact_case = static_cast<double>(ap.q) >= x;
    probe.lower_holds = probe.product_value >= probe.G_star * (1.0 - 1e-14);

    const double sum_dev = std::abs(probe.sum_value - probe.g_star);
    const double log_ratio = std::log(probe.product_value / probe.G_star);
    if (probe.exact_case) {
        probe.sum_constant = sum_dev;
        probe.upper_c = std::max(0.0, log_ratio);
    } else {
        const double phi = static_cast<double>(ap.phi());
        const double scale = loglog(3.0 * x / static_cast<double>(ap.q));
        probe.sum_constant = sum_dev * phi / scale;
        probe.upper_c = std::max(0.0, log_ratio) * phi / scale;
    }
    return probe;
}

BatchAccumulation accumulate_checkpoints(const sieve::PrimeTable& table,
                                         std::vector<double> checkpoints,
                                         std::vector<sieve::APTarget> targets) {
    if (checkpoints.empty() || targets.empty())
        throw std::invalid_argument(
            "accumulate_checkpoints: need at least one checkpoint and target");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw std::invalid_argument(
            "accumulate_checkpoints: checkpoints must be ascending");
    for (double x : checkpoints) {
        if (!(x >= 2.0))
            throw sieve::RangeError("accumulate_checkpoints: checkpoints must be >= 2");
        floor_checked(table, x);
    }

    const std::size_t n = targets.size();
    const std::size_t m = checkpoints.size();
    std::vector<num::KahanSum> sums(n), prods(n);
    std::vector<std::uint64_t> residues(n);
    for (std::size_t i = 0; i < n; ++i) residues[i] = targets[i].a % targets[i].q;

    BatchAccumulation out;
    out.checkpoints = checkpoints;
    out.targets = targets;
    out.sum_recip.assign(n, std::vector<double>(m, 0.0));
    out.product_log.assign(n, std::vector<double>(m, 0.0));

    std::size_t k = 0;
    const auto record = [&](std::size_t slot) {
        for (std::size_t i = 0; i < n; ++i) {
            out.sum_recip[i][slot] = sums[i].value();
            out.product_log[i][slot] = prods[i].value();
        }
    };

    const std::uint64_t hi =
        static_cast<std::uint64_t>(std::floor(checkpoints.back()));
    table.for_each_prime(2, hi, [&](std::uint64_t p) {
        while (k < m && static_cast<double>(p) > checkpoints[k]) record(k++);
        const double pd = static_cast<double>(p);
        for (std::size_t i = 0; i < n; ++i) {
            if (p % targets[i].q != residues[i]) continue;
            sums[i].add(1.0 / pd);
            prods[i].add(-std::log1p(-1.0 / pd));
        }
    });
    while (k < m) record(k++);
    return out;
}

}  // namespace mertens::sums
