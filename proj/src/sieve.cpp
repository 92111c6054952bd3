#include "mertens/sieve.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>

#include "mertens/numeric.hpp"

namespace mertens::sieve {

namespace {

constexpr char kMagic[5] = {'M', 'F', 'S', 'V', '1'};

std::uint64_t floor_t(double t, std::uint64_t limit, const char* who) {
    if (!(t >= 2.0)) throw RangeError(std::string(who) + ": t must be >= 2");
    if (t > static_cast<double>(limit))
        throw RangeError(std::string(who) + ": t exceeds table limit");
    return static_cast<std::uint64_t>(t);
}

// Simple (non-segmented) odd sieve used for base primes up to sqrt(limit).
std::vector<std::uint32_t> base_primes(std::uint64_t bound) {
    std::vector<std::uint32_t> primes;
    if (bound < 3) return primes;
    const std::uint64_t half = (bound - 1) / 2;  // odd numbers 3..bound
    std::vector<bool> composite(half + 1, false);
    for (std::uint64_t i = 1; 2 * i + 1 <= bound / (2 * i + 1); ++i) {
        if (composite[i]) continue;
        const std::uint64_t p = 2 * i + 1;
        for (std::uint64_t j = (p * p) >> 1; j <= half; j += p) composite[j] = true;
    }
    for (std::uint64_t i = 1; i <= half; ++i)
        if (!composite[i]) primes.push_back(static_cast<std::uint32_t>(2 * i + 1));
    return primes;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

bool read_u64(std::istream& in, std::uint64_t& v) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return true;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 4);
}

bool read_u32(std::istream& in, std::uint32_t& v) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return true;
}

}  // namespace

APTarget::APTarget(std::uint64_t q_, std::uint64_t a_) : q(q_), a(a_) {
    if (q == 0) throw std::invalid_argument("APTarget: q must be positive");
    if (a == 0 || a > q)
        throw std::invalid_argument("APTarget: residue must satisfy 1 <= a <= q");
    if (std::gcd(q, a) != 1)
        throw std::invalid_argument("APTarget: gcd(q, a) must be 1");
    phi_ = num::totient(q);
}

std::uint64_t APTarget::phi() const { return phi_; }

PrimeTable PrimeTable::build(std::uint64_t limit, std::size_t segment_bytes,
                             unsigned threads) {
    if (limit < 2 || limit > (1ull << 40))
        throw RangeError("build: limit must be in [2, 2^40]");
    if (segment_bytes < 64) segment_bytes = 64;

    PrimeTable table;
    table.limit_ = limit;
    table.segment_bytes_ = segment_bytes;
    // Bit i represents the odd number 2i+1; the last valid index is the one
    // of the largest odd number <= limit.
    const std::uint64_t last_index = (limit - 1) >> 1;
    table.words_.assign(last_index / 64 + 1, ~0ull);

    // Clear bit 0 (represents 1) and any slack beyond the last valid index.
    table.words_[0] &= ~1ull;
    table.words_.back() &= ~0ull >> (63 - (last_index & 63));

    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
    const std::vector<std::uint32_t> bases = base_primes(root + 1);

    // Segment boundaries in bit-index space, aligned to whole words so that
    // concurrent segment sieving never touches the same word.
    const std::uint64_t seg_bits = (segment_bytes * 8 / 64) * 64;
    const std::uint64_t total_bits = last_index + 1;
    const std::uint64_t num_segments = (total_bits + seg_bits - 1) / seg_bits;

    auto sieve_segment = [&](std::uint64_t seg) {
        const std::uint64_t bit_lo = seg * seg_bits;
        const std::uint64_t bit_hi = std::min(bit_lo + seg_bits, total_bits);  // exclusive
        const std::uint64_t lo = 2 * bit_lo + 1;   // first odd number covered
        const std::uint64_t hi = 2 * bit_hi - 1;   // last odd number covered
        for (std::uint32_t p32 : bases) {
            const std::uint64_t p = p32;
            std::uint64_t start = p * p;
            if (start > hi) break;
            if (start < lo) {
                std::uint64_t m = (lo + p - 1) / p;
                if (m % 2 == 0) ++m;  // odd multiples only
                start = m * p;
                if (start > hi) continue;
            }
            for (std::uint64_t n = start; n <= hi; n += 2 * p) {
                const std::uint64_t i = n >> 1;
                table.words_[i >> 6] &= ~(1ull << (i & 63));
            }
        }
    };

    unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, num_segments));
    if (n_threads <= 1) {
        for (std::uint64_t seg = 0; seg < num_segments; ++seg) sieve_segment(seg);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::uint64_t seg = t; seg < num_segments; seg += n_threads)
                    sieve_segment(seg);
            });
        }
        for (auto& th : pool) th.join();
    }
    return table;
}

std::uint64_t PrimeTable::pi(double t) const {
    const std::uint64_t x = floor_t(t, limit_, "pi");
    std::uint64_t count = 1;  // the prime 2
    const std::uint64_t last = (x - 1) >> 1;  // index of largest odd <= x
    const std::uint64_t last_w = last >> 6;
    for (std::uint64_t w = 0; w < last_w; ++w) count += std::popcount(words_[w]);
    count += std::popcount(words_[last_w] & (~0ull >> (63 - (last & 63))));
    return count;
}

std::uint64_t PrimeTable::pi_ap(double t, const APTarget& ap) const {
    const std::uint64_t x = floor_t(t, limit_, "pi_ap");
    std::uint64_t count = 0;
    for_each_prime(2, x, [&](std::uint64_t p) {
        if (p % ap.q == ap.a % ap.q) ++count;
    });
    return count;
}

double PrimeTable::error_term(double t, const APTarget& ap) const {
    return static_cast<double>(pi_ap(t, ap)) - li(t) / static_cast<double>(ap.phi());
}

CountingSnapshot PrimeTable::snapshot(double t, const APTarget& ap) const {
    CountingSnapshot s;
    s.t = t;
    s.pi = pi(t);
    s.pi_ap = pi_ap(t, ap);
    s.li = li(t);
    s.error = static_cast<double>(s.pi_ap) - s.li / static_cast<double>(ap.phi());
    return s;
}

void PrimeTable::save(const std::filesystem::path& file) const {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save: cannot open " + file.string());

    out.write(kMagic, sizeof(kMagic));
    write_u64(out, limit_);
    write_u64(out, segment_bytes_);

    const std::size_t total_bytes = words_.size() * 8;
    const std::size_t num_segments = (total_bytes + segment_bytes_ - 1) / segment_bytes_;
    write_u64(out, num_segments);

    const auto* raw = reinterpret_cast<const unsigned char*>(words_.data());
    for (std::size_t s = 0; s < num_segments; ++s) {
        const std::size_t off = s * segment_bytes_;
        const std::size_t len = std::min(segment_bytes_, total_bytes - off);
        const auto crc = static_cast<std::uint32_t>(
            crc32(0L, raw + off, static_cast<uInt>(len)));
        write_u32(out, crc);
    }
    out.write(reinterpret_cast<const char*>(raw),
              static_cast<std::streamsize>(total_bytes));
    if (!out) throw std::runtime_error("save: write failed for " + file.string());
}

std::optional<PrimeTable> PrimeTable::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;

    char magic[5];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, 5) != 0)
        return std::nullopt;

    PrimeTable table;
    std::uint64_t segment_bytes = 0, num_segments = 0;
    if (!read_u64(in, table.limit_) || !read_u64(in, segment_bytes) ||
        !read_u64(in, num_segments))
        return std::nullopt;
    if (table.limit_ < 2 || table.limit_ > (1ull << 40) || segment_bytes < 64)
        return std::nullopt;
    table.segment_bytes_ = segment_bytes;

    const std::uint64_t bits = (table.limit_ >> 1) + 1;
    const std::size_t words = (bits + 63) / 64;
    const std::size_t total_bytes = words * 8;
    const std::size_t expect_segments =
        (total_bytes + segment_bytes - 1) / segment_bytes;
    if (num_segments != expect_segments) return std::nullopt;

    std::vector<std::uint32_t> crcs(num_segments);
    for (auto& c : crcs)
        if (!read_u32(in, c)) return std::nullopt;

    table.words_.resize(words);
    auto* raw = reinterpret_cast<unsigned char*>(table.words_.data());
    if (!in.read(reinterpret_cast<char*>(raw),
                 static_cast<std::streamsize>(total_bytes)))
        return std::nullopt;

    for (std::size_t s = 0; s < num_segments; ++s) {
        const std::size_t off = s * segment_bytes;
        const std::size_t len = std::min<std::size_t>(segment_bytes, total_bytes - off);
        const auto crc = static_cast<std::uint32_t>(
            crc32(0L, raw + off, static_cast<uInt>(len)));
        if (crc != crcs[s]) return std::nullopt;
    }
    return table;
}

PrimeTable PrimeTable::obtain(std::uint64_t limit,
                              const std::filesystem::path& cache_dir,
                              std::size_t segment_bytes, unsigned threads) {
    if (cache_dir.empty()) return build(limit, segment_bytes, threads);

    char name[64];
    std::snprintf(name, sizeof(name), "primes-%llu.mfsv1",
                  static_cast<unsigned long long>(limit));
    const std::filesystem::path file = cache_dir / name;

    if (auto cached = load(file); cached && cached->limit() == limit)
        return std::move(*cached);

    PrimeTable fresh = build(limit, segment_bytes, threads);
    try {
        fresh.save(file);
    } catch (const std::exception&) {
        // Caching is best-effort; an unwritable cache dir is not fatal.
    }
    return fresh;
}

double li(double t) {
    if (!(t >= 2.0)) throw RangeError("li: t must be >= 2");
    if (t == 2.0) return 0.0;
    const auto result = num::integrate(
        [](double u) { return 1.0 / std::log(u); }, 2.0, t, 1e-12);
    return result.value;
}

std::uint64_t omega_q(const PrimeTable& table, double t, std::uint64_t q) {
    if (!(t >= 2.0)) throw RangeError("omega_q: t must be >= 2");
    if (t > static_cast<double>(table.limit()))
        throw RangeError("omega_q: t exceeds table limit");
    const auto bound = static_cast<std::uint64_t>(t);
    std::uint64_t count = 0;
    for (std::uint64_t p : num::prime_factors(q))
        if (p <= bound) ++count;
    return count;
}

}  // namespace mertens::sieve
