#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "mertens/sieve.hpp"

using mertens::sieve::APTarget;
using mertens::sieve::PrimeTable;

namespace {

// Oracle: trial-division primality, independent of the sieve.
bool trial_division_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Oracle: composite Simpson rule with doubling until two refinements agree.
double simpson_li(double t) {
    auto f = [](double u) { return 1.0 / std::log(u); };
    double previous = 0.0;
    for (std::size_t n = 64;; n *= 2) {
        const double h = (t - 2.0) / static_cast<double>(n);
        double sum = f(2.0) + f(t);
        for (std::size_t i = 1; i < n; ++i)
            sum += f(2.0 + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
        const double value = sum * h / 3.0;
        if (n > 64 && std::abs(value - previous) < 1e-11 * std::max(1.0, std::abs(value)))
            return value;
        previous = value;
        if (n > (1u << 24)) return value;
    }
}

}  // namespace

TEST_CASE("membership matches trial division exhaustively to 1e5") {
    const auto table = PrimeTable::build(100000);
    for (std::uint64_t n = 2; n <= 100000; ++n)
        REQUIRE(table.is_prime(n) == trial_division_prime(n));
}

TEST_CASE("prime counts at classical checkpoints") {
    const auto table = PrimeTable::build(1000000);
    CHECK(table.pi(10) == 4);
    CHECK(table.pi(100) == 25);
    CHECK(table.pi(1000) == 168);
    CHECK(table.pi(10000) == 1229);
    CHECK(table.pi(100000) == 9592);
    CHECK(table.pi(1000000) == 78498);
}

TEST_CASE("small limits and parity edge cases") {
    SUBCASE("limit 10") {
        const auto table = PrimeTable::build(10);
        std::vector<std::uint64_t> primes;
        table.for_each_prime(2, 10, [&](std::uint64_t p) { primes.push_back(p); });
        CHECK(primes == std::vector<std::uint64_t>{2, 3, 5, 7});
    }
    SUBCASE("even limit does not leak the next odd number") {
        const auto table = PrimeTable::build(12);
        CHECK(table.pi(12) == 5);  // 2 3 5 7 11; 13 is out of range
        std::vector<std::uint64_t> primes;
        table.for_each_prime(2, 12, [&](std::uint64_t p) { primes.push_back(p); });
        CHECK(primes.back() == 11);
    }
    SUBCASE("limit 2") {
        const auto table = PrimeTable::build(2);
        CHECK(table.pi(2) == 1);
        CHECK(table.is_prime(2));
    }
    SUBCASE("limit below minimum is rejected") {
        CHECK_THROWS(PrimeTable::build(1));
    }
}

TEST_CASE("build is invariant under segment size and thread count") {
    const auto reference = PrimeTable::build(300000);
    for (std::size_t seg : {64u, 1024u, 4096u, 65536u}) {
        const auto other = PrimeTable::build(300000, seg, 3);
        REQUIRE(other.words() == reference.words());
    }
}

TEST_CASE("pi_ap counts progressions exactly") {
    const auto table = PrimeTable::build(1000000);
    CHECK(table.pi_ap(10, APTarget(4, 1)) == 1);   // just 5
    CHECK(table.pi_ap(10, APTarget(1, 1)) == 4);   // all primes <= 10
    CHECK(table.pi_ap(2, APTarget(3, 1)) == 0);    // 2 is 2 mod 3

    // Oracle: direct enumeration with trial division.
    for (std::uint64_t q : {3ull, 4ull, 5ull, 12ull}) {
        for (std::uint64_t a = 1; a <= q; ++a) {
            if (std::gcd(q, a) != 1) continue;
            std::uint64_t expected = 0;
            for (std::uint64_t n = 2; n <= 20000; ++n)
                if (trial_division_prime(n) && n % q == a % q) ++expected;
            CHECK(table.pi_ap(20000, APTarget(q, a)) == expected);
        }
    }
}

TEST_CASE("residue classes partition the primes") {
    const auto table = PrimeTable::build(1000000);
    for (std::uint64_t q = 1; q <= 30; ++q) {
        for (double t : {100.0, 12345.0, 1000000.0}) {
            std::uint64_t total = 0;
            for (std::uint64_t a = 1; a <= q; ++a)
                if (std::gcd(q, a) == 1) total += table.pi_ap(t, APTarget(q, a));
            total += mertens::sieve::omega_q(table, t, q);
            REQUIRE(total == table.pi(t));
        }
    }
}

TEST_CASE("pi_ap is nondecreasing in t") {
    const auto table = PrimeTable::build(100000);
    const APTarget ap(7, 3);
    std::uint64_t prev = 0;
    for (double t = 2; t <= 100000; t *= 1.7) {
        const std::uint64_t cur = table.pi_ap(t, ap);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("li matches a Simpson-refinement oracle") {
    CHECK(mertens::sieve::li(2.0) == 0.0);
    for (double t : {10.0, 1000.0, 1000000.0}) {
        const double expected = simpson_li(t);
        CHECK(mertens::sieve::li(t) == doctest::Approx(expected).epsilon(1e-11));
    }
    // Frozen reference values for the lower-limit-2 normalization.
    CHECK(mertens::sieve::li(10.0) == doctest::Approx(5.12043572466980).epsilon(1e-12));
    CHECK(mertens::sieve::li(1e6) == doctest::Approx(78626.5039956821).epsilon(1e-12));
    CHECK_THROWS(mertens::sieve::li(1.5));
}

TEST_CASE("error term combines the two counting functions") {
    const auto table = PrimeTable::build(1000000);
    const double e = table.error_term(10.0, APTarget(4, 1));
    CHECK(e == doctest::Approx(1.0 - 5.12043572466980 / 2.0).epsilon(1e-10));
    CHECK(table.error_term(2.0, APTarget(1, 1)) == doctest::Approx(1.0));
    // pi(1e6) - li(1e6) is the classical negative-bias value near -128.5.
    const double e1 = table.error_term(1e6, APTarget(1, 1));
    CHECK(e1 == doctest::Approx(78498.0 - 78626.5039956821).epsilon(1e-8));
}

TEST_CASE("omega_q counts prime divisors up to t") {
    const auto table = PrimeTable::build(1000);
    CHECK(mertens::sieve::omega_q(table, 10, 12) == 2);
    CHECK(mertens::sieve::omega_q(table, 2, 15) == 0);
    CHECK(mertens::sieve::omega_q(table, 100, 30) == 3);
}

TEST_CASE("degenerate t below 2 is rejected, not silently zero") {
    const auto table = PrimeTable::build(100);
    CHECK_THROWS(table.pi(1.9));
    CHECK_THROWS(table.pi_ap(0.0, APTarget(3, 1)));
    CHECK_THROWS(table.pi(101.0));
}

TEST_CASE("APTarget validates its invariants") {
    CHECK_THROWS(APTarget(4, 2));
    CHECK_THROWS(APTarget(6, 8));
    CHECK_THROWS(APTarget(5, 0));
    const APTarget ok(12, 7);
    CHECK(ok.phi() == 4);
}

TEST_CASE("cache round-trips and rejects corruption") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mertens-sieve-test";
    fs::remove_all(dir);

    const auto table = PrimeTable::obtain(100000, dir);
    const fs::path file = dir / "primes-100000.mfsv1";
    REQUIRE(fs::exists(file));

    SUBCASE("round trip reproduces identical bits") {
        const auto loaded = PrimeTable::load(file);
        REQUIRE(loaded.has_value());
        CHECK(loaded->limit() == 100000);
        CHECK(loaded->words() == table.words());
    }

    SUBCASE("bit flip in a payload is detected") {
        auto bytes = [&] {
            std::ifstream in(file, std::ios::binary);
            return std::vector<char>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
        }();
        bytes[bytes.size() - 7] ^= 0x10;
        {
            std::ofstream out(file, std::ios::binary | std::ios::trunc);
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        }
        CHECK_FALSE(PrimeTable::load(file).has_value());
        // obtain() must fall back to a rebuild and repair the file.
        const auto rebuilt = PrimeTable::obtain(100000, dir);
        CHECK(rebuilt.words() == table.words());
        CHECK(PrimeTable::load(file).has_value());
    }

    SUBCASE("truncated file is rejected") {
        fs::resize_file(file, 64);
        CHECK_FALSE(PrimeTable::load(file).has_value());
    }

    fs::remove_all(dir);
}
