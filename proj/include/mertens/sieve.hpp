#pragma once

// Prime generation and the counting functions everything else consumes:
// pi(t), pi(t;q,a), li(t), the error term E(t;q,a) = pi(t;q,a) - li(t)/phi(q),
// and omega(t;q) = #{p <= t : p | q}.
//
// Primes are stored in an odd-only bitset (bit i <-> odd number 2i+1, bit set
// means prime). Building uses a segmented sieve of Eratosthenes; completed
// tables are immutable and safe for concurrent reads. Tables can be cached on
// disk with per-segment checksums.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mertens::sieve {

// Error kinds surfaced to the CLI exit-code mapping.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An arithmetic progression target a mod q with gcd(q, a) = 1, 1 <= a <= q.
struct APTarget {
    std::uint64_t q = 1;
    std::uint64_t a = 1;

    APTarget(std::uint64_t q_, std::uint64_t a_);
    std::uint64_t phi() const;  // Euler totient of q (cached at construction)

private:
    std::uint64_t phi_ = 1;
};

struct CountingSnapshot {
    double t = 0.0;
    std::uint64_t pi = 0;
    std::uint64_t pi_ap = 0;
    double li = 0.0;
    double error = 0.0;  // pi_ap - li/phi(q)
};

class PrimeTable {
public:
    // Sieve [2, limit]. 2 <= limit <= 2^40. segment_bytes controls the working
    // set of each sieving pass (default 256 KiB, sized for L2 cache); threads
    // 0 means hardware concurrency.
    static PrimeTable build(std::uint64_t limit,
                            std::size_t segment_bytes = 256 * 1024,
                            unsigned threads = 0);

    // Load from a cache file, verifying magic, limit and per-segment CRCs.
    // Returns nullopt if the file is missing, malformed, or checksum-corrupt
    // (callers are expected to rebuild in that case).
    static std::optional<PrimeTable> load(const std::filesystem::path& file);

    // Build with disk caching: if cache_dir is nonempty, try to load
    // "primes-<limit>.mfsv1" from it first; on miss or corruption, rebuild
    // and (re)write the file. An empty cache_dir means no disk access.
    static PrimeTable obtain(std::uint64_t limit,
                             const std::filesystem::path& cache_dir,
                             std::size_t segment_bytes = 256 * 1024,
                             unsigned threads = 0);

    void save(const std::filesystem::path& file) const;

    std::uint64_t limit() const { return limit_; }
    std::size_t segment_bytes() const { return segment_bytes_; }

    bool is_prime(std::uint64_t n) const {
        if (n > limit_) throw RangeError("is_prime: beyond table limit");
        if (n < 3) return n == 2;
        if (n % 2 == 0) return false;
        const std::uint64_t i = n >> 1;
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    // Counting functions take real t >= 2 and count primes <= floor(t).
    std::uint64_t pi(double t) const;
    std::uint64_t pi_ap(double t, const APTarget& ap) const;
    double error_term(double t, const APTarget& ap) const;
    CountingSnapshot snapshot(double t, const APTarget& ap) const;

    // Visit every prime p with lo <= p <= hi in increasing order.
    template <class F>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const {
        if (hi > limit_) throw RangeError("for_each_prime: beyond table limit");
        if (lo > hi) return;
        if (lo <= 2 && hi >= 2) f(std::uint64_t{2});
        std::uint64_t begin = std::max<std::uint64_t>(lo, 3);
        if (begin % 2 == 0) ++begin;
        if (begin > hi) return;
        std::uint64_t i = begin >> 1;
        const std::uint64_t last = (hi - 1) >> 1;  // index of largest odd <= hi
        std::uint64_t w = i >> 6;
        std::uint64_t word = words_[w] & (~0ull << (i & 63));
        const std::uint64_t last_w = last >> 6;
        while (true) {
            if (w == last_w) word &= ~0ull >> (63 - (last & 63));
            while (word != 0) {
                const int bit = std::countr_zero(word);
                f(((w << 6) + static_cast<std::uint64_t>(bit)) * 2 + 1);
                word &= word - 1;
            }
            if (w == last_w) break;
            word = words_[++w];
        }
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    PrimeTable() = default;

    std::uint64_t limit_ = 0;
    std::size_t segment_bytes_ = 0;
    std::vector<std::uint64_t> words_;  // odd-only bitset, bit set = prime
};

// Logarithmic integral with lower limit 2: li(t) = integral_2^t du/log(u),
// evaluated by adaptive quadrature to relative accuracy 1e-12. Requires t >= 2.
double li(double t);

// Number of prime divisors of q that are <= t.
std::uint64_t omega_q(const PrimeTable& table, double t, std::uint64_t q);

}  // namespace mertens::sieve
