#pragma once

// Constants attached to the primes in an arithmetic progression a mod q:
// the positive number script_L with
//     script_L(q,a)^phi(q) = (phi(q)/q) * prod_{chi != chi0} L(1,chi)^conj(chi)(a),
// the Mertens-type constant
//     g(q,a) = gamma/phi(q) + log script_L(q,a) - sum_{p^nu = a (q), nu >= 2} 1/(nu p^nu),
// the product constant
//     G(q,a) = script_L(q,a) * exp( sum_{p = a (q), nu >= 2} 1/(nu p^nu)
//                                   - sum_{p^nu = a (q), nu >= 2} 1/(nu p^nu) ),
// and their degenerate large-q limits g*(q,a), G*(q,a).

#include <cstdint>
#include <map>
#include <memory>
#include <tuple>
#include <utility>
#include <vector>

#include "mertens/sieve.hpp"
#include "mertens/special_functions.hpp"

namespace mertens::ap {

// Which congruence restricts a prime-power pair (p, nu), nu >= 2:
// kExponentSum keeps pairs with p^nu = a mod q, kResidueSum those with
// p = a mod q (all nu).
enum class CorrectionMode { kExponentSum, kResidueSum };

struct Correction {
    double value = 0.0;
    double tail_bound = 0.0;  // 1/P covers every discarded pair with p > P
};

// One pass over primes p <= P computing the correction for every residue
// class simultaneously; entry [r] holds the sum for a = r (index a % q).
struct CorrectionTable {
    std::uint64_t q = 1;
    std::uint64_t cutoff = 0;
    double tail_bound = 0.0;
    std::vector<double> value;  // size q, indexed by residue
};

CorrectionTable correction_table(const sieve::PrimeTable& primes,
                                 std::uint64_t q, std::uint64_t P,
                                 CorrectionMode mode);

// sum over primes p <= P and 2 <= nu (nu capped once 1/(nu p^nu) underflows)
// of 1/(nu p^nu), restricted per mode. Requires q <= P <= primes.limit().
Correction prime_power_correction(const sieve::PrimeTable& primes,
                                  std::uint64_t q, std::uint64_t a,
                                  std::uint64_t P, CorrectionMode mode);

// Degenerate limits: 1/a resp. (1 - 1/a)^{-1} when q >= 2 and a is prime,
// else 0 resp. 1. Requires gcd(q,a) = 1 and a <= q.
double g_star(std::uint64_t q, std::uint64_t a);
double G_star(std::uint64_t q, std::uint64_t a);

struct APConstants {
    sieve::APTarget target;
    double script_L = 1.0;
    double g = 0.0;
    double G = 1.0;
    double g_star = 0.0;
    double G_star = 1.0;
    std::uint64_t correction_cutoff = 0;
    double tail_bound = 0.0;
};

// Computes the constants above, sharing one prime table and memoizing the
// L-function work per modulus. Not thread-safe; distinct instances may run
// concurrently against the same table.
class ConstantsCalculator {
public:
    static constexpr std::uint64_t kDefaultCutoff = 10'000'000;

    explicit ConstantsCalculator(std::shared_ptr<const sieve::PrimeTable> primes);

    // exp((1/phi) [log(phi/q) + sum_{chi != chi0} conj(chi)(a) log L(1,chi)]);
    // the bracket's imaginary part must cancel to <= 1e-8 or a
    // ConsistencyError (branch-tracking fault) is raised.
    double script_L(std::uint64_t q, std::uint64_t a);

    double g_constant(std::uint64_t q, std::uint64_t a, std::uint64_t P);

    // Both displayed forms of G(q,a) are assembled and must agree within
    // 2*tail_bound + 1e-8; the script_L-based form is returned.
    double G_constant(std::uint64_t q, std::uint64_t a, std::uint64_t P);

    APConstants constants(std::uint64_t q, std::uint64_t a, std::uint64_t P);

    // | sum_{a: gcd(a,q)=1} g(q,a) - (g(1,1) - sum_{p|q} 1/p) |, all constants
    // sharing the cutoff P, under which the truncation tails cancel exactly.
    double sum_identity_residual(std::uint64_t q, std::uint64_t P);

    const sieve::PrimeTable& primes() const { return *primes_; }

private:
    sf::LEvaluator& evaluator(std::uint64_t q);
    const CorrectionTable& corrections(std::uint64_t q, std::uint64_t P,
                                       CorrectionMode mode);

    std::shared_ptr<const sieve::PrimeTable> primes_;
    std::map<std::uint64_t, sf::LEvaluator> evaluators_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> script_cache_;
    std::map<std::tuple<std::uint64_t, std::uint64_t, int>, CorrectionTable>
        correction_cache_;
};

}  // namespace mertens::ap
