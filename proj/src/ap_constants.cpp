#include "mertens/ap_constants.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mertens/numeric.hpp"

namespace mertens::ap {

namespace {

void check_cutoff(const sieve::PrimeTable& primes, std::uint64_t q,
                  std::uint64_t P) {
    if (P < q)
        throw sieve::RangeError("correction cutoff P must be at least q");
    if (P > primes.limit())
        throw sieve::RangeError("correction cutoff P exceeds the sieve limit");
}

// Unlike the degenerate constants, script_L/g/G are defined for any positive
// residue coprime to q (they depend on a mod q only).
void check_progression(std::uint64_t q, std::uint64_t a) {
    if (q == 0 || a == 0)
        throw std::invalid_argument("modulus and residue must be positive");
    if (std::gcd(q, a) != 1)
        throw std::invalid_argument("residue must be coprime to the modulus");
}

}  // namespace

CorrectionTable correction_table(const sieve::PrimeTable& primes,
                                 std::uint64_t q, std::uint64_t P,
                                 CorrectionMode mode) {
    check_cutoff(primes, q, P);
    std::vector<num::KahanSum> buckets(q);
    primes.for_each_prime(2, P, [&](std::uint64_t p) {
        const double pd = static_cast<double>(p);
        const std::uint64_t p_mod = p % q;
        if (mode == CorrectionMode::kResidueSum) {
            auto& bucket = buckets[p_mod];
            double power = pd * pd;
            for (int nu = 2; nu <= 64 && power < 1e300; ++nu, power *= pd) {
                bucket.add(1.0 / (nu * power));
            }
        } else {
            std::uint64_t pw_mod = num::mulmod(p_mod, p_mod, q);
            double power = pd * pd;
            for (int nu = 2; nu <= 64 && power < 1e300; ++nu, power *= pd) {
                buckets[pw_mod].add(1.0 / (nu * power));
                pw_mod = num::mulmod(pw_mod, p_mod, q);
            }
        }
    });
    CorrectionTable table;
    table.q = q;
    table.cutoff = P;
    table.tail_bound = 1.0 / static_cast<double>(P);
    table.value.reserve(q);
    for (auto& bucket : buckets) table.value.push_back(bucket.value());
    return table;
}

Correction prime_power_correction(const sieve::PrimeTable& primes,
                                  std::uint64_t q, std::uint64_t a,
                                  std::uint64_t P, CorrectionMode mode) {
    check_progression(q, a);
    const CorrectionTable table = correction_table(primes, q, P, mode);
    return Correction{table.value[a % q], table.tail_bound};
}

double g_star(std::uint64_t q, std::uint64_t a) {
    sieve::APTarget target(q, a);
    if (q >= 2 && num::is_prime_u64(a)) return 1.0 / static_cast<double>(a);
    return 0.0;
}

double G_star(std::uint64_t q, std::uint64_t a) {
    sieve::APTarget target(q, a);
    if (q >= 2 && num::is_prime_u64(a))
        return 1.0 / (1.0 - 1.0 / static_cast<double>(a));
    return 1.0;
}

ConstantsCalculator::ConstantsCalculator(
    std::shared_ptr<const sieve::PrimeTable> primes)
    : primes_(std::move(primes)) {
    if (!primes_)
        throw std::invalid_argument("ConstantsCalculator: prime table required");
}

sf::LEvaluator& ConstantsCalculator::evaluator(std::uint64_t q) {
    auto it = evaluators_.find(q);
    if (it != evaluators_.end()) return it->second;
    return evaluators_.emplace(q, sf::LEvaluator(q)).first->second;
}

const CorrectionTable& ConstantsCalculator::corrections(std::uint64_t q,
                                                        std::uint64_t P,
                                                        CorrectionMode mode) {
    const auto key = std::make_tuple(q, P, static_cast<int>(mode));
    auto it = correction_cache_.find(key);
    if (it != correction_cache_.end()) return it->second;
    return correction_cache_
        .emplace(key, correction_table(*primes_, q, P, mode))
        .first->second;
}

double ConstantsCalculator::script_L(std::uint64_t q, std::uint64_t a) {
    check_progression(q, a);
    if (q == 1) return 1.0;
    const auto key = std::make_pair(q, a % q);
    if (auto it = script_cache_.find(key); it != script_cache_.end())
        return it->second;

    const double phi = static_cast<double>(num::totient(q));
    auto& ev = evaluator(q);
    std::complex<double> bracket = std::log(phi / static_cast<double>(q));
    for (const auto& chi : ev.characters()) {
        if (chi.is_principal()) continue;
        bracket += std::conj(chi.eval(a)) * ev.log_l_one(chi).value;
    }
    if (std::abs(bracket.imag()) > 1e-8)
        throw sf::ConsistencyError(
            "script_L: character logarithms left an imaginary residue "
            "(branch-tracking fault)");
    const double value = std::exp(bracket.real() / phi);
    script_cache_.emplace(key, value);
    return value;
}

double ConstantsCalculator::g_constant(std::uint64_t q, std::uint64_t a,
                                       std::uint64_t P) {
    check_progression(q, a);
    const auto& expo = corrections(q, P, CorrectionMode::kExponentSum);
    return sf::euler_gamma() / static_cast<double>(num::totient(q)) +
           std::log(script_L(q, a)) - expo.value[a % q];
}

double ConstantsCalculator::G_constant(std::uint64_t q, std::uint64_t a,
                                       std::uint64_t P) {
    check_progression(q, a);
    const auto& expo = corrections(q, P, CorrectionMode::kExponentSum);
    const auto& resid = corrections(q, P, CorrectionMode::kResidueSum);
    const double L = script_L(q, a);
    const double phi = static_cast<double>(num::totient(q));
    const double delta = resid.value[a % q] - expo.value[a % q];

    const double from_script_L = L * std::exp(delta);
    const double g = sf::euler_gamma() / phi + std::log(L) - expo.value[a % q];
    const double from_g =
        std::exp(-sf::euler_gamma() / phi + g + resid.value[a % q]);
    if (std::abs(from_script_L - from_g) > 2.0 * expo.tail_bound + 1e-8)
        throw sf::ConsistencyError(
            "G_constant: the two defining forms disagree beyond tail bounds");
    return from_script_L;
}

APConstants ConstantsCalculator::constants(std::uint64_t q, std::uint64_t a,
                                           std::uint64_t P) {
    check_progression(q, a);
    const std::uint64_t reduced = (a - 1) % q + 1;  // least positive residue
    APConstants out{sieve::APTarget(q, reduced)};
    out.script_L = script_L(q, a);
    out.g = g_constant(q, a, P);
    out.G = G_constant(q, a, P);
    out.g_star = g_star(q, reduced);
    out.G_star = G_star(q, reduced);
    out.correction_cutoff = P;
    out.tail_bound = 1.0 / static_cast<double>(P);
    return out;
}

double ConstantsCalculator::sum_identity_residual(std::uint64_t q,
                                                  std::uint64_t P) {
    num::KahanSum lhs;
    for (std::uint64_t a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        lhs.add(g_constant(q, a, P));
    }
    double rhs = g_constant(1, 1, P);
    for (std::uint64_t p : num::prime_factors(q))
        rhs -= 1.0 / static_cast<double>(p);
    return std::abs(lhs.value() - rhs);
}

}  // namespace mertens::ap
