#pragma once

// Exact partial-summation identities and asymptotic-law reports for primes in
// an arithmetic progression:  sum_{p<=x, p=a(q)} 1/p against
// phi(q)^{-1} loglog x + g(q,a), and the log of prod (1-1/p)^{-1} against
// phi(q)^{-1}(gamma + loglog x) + log G(q,a). Step-function integrals are
// evaluated exactly as prime sums, never by quadrature.

#include <cstdint>
#include <vector>

#include "mertens/ap_constants.hpp"
#include "mertens/sieve.hpp"

namespace mertens::sums {

struct MertensRow {
    MertensRow(double x_, sieve::APTarget target_) : x(x_), target(target_) {}

    double x;
    sieve::APTarget target;
    double sum_recip = 0.0;             // sum 1/p over p <= x, p = a mod q
    double product_log = 0.0;           // sum log(1 - 1/p)^{-1}, same primes
    double predicted_sum = 0.0;
    double predicted_product_log = 0.0;
    double residual_sum = 0.0;          // observed - predicted, as computed
    double residual_product = 0.0;
};

// sum 1/p and sum log(1-1/p)^{-1} over p <= x, p = a mod q (compensated).
double partial_sum_recip(const sieve::PrimeTable& table, double x,
                         const sieve::APTarget& ap);
double partial_product_log(const sieve::PrimeTable& table, double x,
                           const sieve::APTarget& ap);

// | sum_{p<=x} 1/p  -  [ pi(x;q,a)/x + int_2^x t^{-2} pi(t;q,a) dt ] | with
// the integral summed exactly; zero up to rounding.
double abel_identity_residual(const sieve::PrimeTable& table, double x,
                              const sieve::APTarget& ap);

// int_2^X t^{-2} E(t;q,a) dt, E = pi(t;q,a) - li(t)/phi(q): the pi part as an
// exact step sum, the li part via the antiderivative -li(t)/t + loglog t.
// Converges to g(q,a) + phi(q)^{-1} loglog 2 as X grows.
double error_integral(const sieve::PrimeTable& table, double X,
                      const sieve::APTarget& ap);

// The finite-data form of the partial-summation identity for sum 1/p: the
// infinite tail integral is truncated at X_tail and g(q,a) is replaced by its
// own truncated-integral surrogate, making the row close algebraically;
// residual_sum is pure rounding. Product fields are left zero.
MertensRow identity_closure_report(const sieve::PrimeTable& table, double x,
                                 double X_tail, const sieve::APTarget& ap);

// Fills both the reciprocal-sum and product-log sides of the row against the
// asymptotic laws, with constants supplied by the caller (their target must
// denote the same progression).
MertensRow product_report(const sieve::PrimeTable& table, double x,
                          const sieve::APTarget& ap,
                          const ap::APConstants& constants);

// Large-modulus degeneration probe. For q < x it reports the observed
// implied constants of the bounds
//   |sum 1/p - g*| <= C phi(q)^{-1} loglog(3x/q)      (sum_constant = C)
//   product <= G* exp(c phi(q)^{-1} loglog(3x/q))     (upper_c = smallest c)
// and whether G* <= product held. For q >= x both sides must be attained
// exactly; sum_constant/upper_c then hold plain absolute deviations.
struct LargeModulusProbe {
    LargeModulusProbe(double x_, sieve::APTarget target_) : x(x_), target(target_) {}

    double x;
    sieve::APTarget target;
    double sum_value = 0.0;
    double product_value = 1.0;
    double g_star = 0.0;
    double G_star = 1.0;
    bool exact_case = false;  // q >= x
    bool lower_holds = false; // G* <= product (within 1e-14 relative slack)
    double upper_c = 0.0;
    double sum_constant = 0.0;
};

LargeModulusProbe large_modulus_probe(const sieve::PrimeTable& table, double x,
                               const sieve::APTarget& ap);

// One ascending pass over the primes up to max(checkpoints), accumulating
// sum 1/p and sum log(1-1/p)^{-1} for every target, snapshotting at each
// checkpoint. Values match the single-target functions bit-for-bit in
// accumulation order.
struct BatchAccumulation {
    std::vector<double> checkpoints;            // ascending
    std::vector<sieve::APTarget> targets;
    std::vector<std::vector<double>> sum_recip;    // [target][checkpoint]
    std::vector<std::vector<double>> product_log;  // [target][checkpoint]
};

BatchAccumulation accumulate_checkpoints(const sieve::PrimeTable& table,
                                         std::vector<double> checkpoints,
                                         std::vector<sieve::APTarget> targets);

}  // namespace mertens::sums
