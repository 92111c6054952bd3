#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mertens/numeric.hpp"

using namespace mertens::num;

TEST_CASE("compensated summation beats naive accumulation") {
    // 1e7 copies of a value with a long binary expansion: naive summation
    // drifts, Kahan stays within a few ulps of n*x.
    const double x = 0.1;
    const std::size_t n = 10000000;
    KahanSum kahan;
    for (std::size_t i = 0; i < n; ++i) kahan.add(x);
    const double exact = static_cast<double>(n) * x;
    CHECK(std::abs(kahan.value() - exact) <= 1e-9);
}

TEST_CASE("kahan merge equals sequential accumulation") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    KahanSum whole, left, right;
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng);
        whole.add(v);
        (i % 2 ? left : right).add(v);
    }
    left.merge(right);
    CHECK(left.value() == doctest::Approx(whole.value()).epsilon(1e-15));
}

TEST_CASE("mulmod and powmod against __int128 brute force") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t m = (rng() % 0xFFFFFFFFFFFFull) + 2;
        const std::uint64_t a = rng() % m;
        const std::uint64_t b = rng() % m;
        const auto expect = static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(a) * b % m);
        REQUIRE(mulmod(a, b, m) == expect);
    }
    CHECK(powmod(2, 10, 1000000007) == 1024);
    CHECK(powmod(3, 0, 7) == 1);
    // Fermat: a^(p-1) = 1 mod p.
    CHECK(powmod(123456789, 1000000006, 1000000007) == 1);
}

TEST_CASE("deterministic Miller-Rabin agrees with trial division") {
    auto trial = [](std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    };
    for (std::uint64_t n = 0; n <= 30000; ++n)
        REQUIRE(is_prime_u64(n) == trial(n));
    CHECK(is_prime_u64(1000000007));
    CHECK_FALSE(is_prime_u64(1000000007ull * 3));
}

TEST_CASE("totient and prime factors") {
    CHECK(totient(1) == 1);
    CHECK(totient(2) == 1);
    CHECK(totient(12) == 4);
    CHECK(totient(9973) == 9972);
    CHECK(totient(27720) == 5760);
    CHECK(prime_factors(12) == std::vector<std::uint64_t>{2, 3});
    CHECK(prime_factors(9973) == std::vector<std::uint64_t>{9973});
    CHECK(prime_factors(1).empty());
}

TEST_CASE("quadrature reproduces closed-form integrals") {
    // smooth polynomial: exact for Gauss-Kronrod
    auto poly = [](double x) { return 3.0 * x * x; };
    CHECK(integrate(poly, 0.0, 2.0).value == doctest::Approx(8.0).epsilon(1e-14));

    // integral of e^-x on [0, 40] = 1 - e^-40
    auto decay = [](double x) { return std::exp(-x); };
    CHECK(integrate(decay, 0.0, 40.0).value ==
          doctest::Approx(1.0 - std::exp(-40.0)).epsilon(1e-13));

    // mildly oscillatory: integral of sin on [0, 20]
    auto osc = [](double x) { return std::sin(x); };
    CHECK(integrate(osc, 0.0, 20.0).value ==
          doctest::Approx(1.0 - std::cos(20.0)).epsilon(1e-12));

    // adaptive refinement near a steep (but integrable) feature
    auto peak = [](double x) { return 1.0 / std::sqrt(x); };
    CHECK(integrate(peak, 1e-8, 1.0, 1e-12).value ==
          doctest::Approx(2.0 - 2e-4).epsilon(1e-9));

    CHECK(integrate(poly, 1.0, 1.0).value == 0.0);
    CHECK_THROWS(integrate(poly, 2.0, 1.0));
}

TEST_CASE("quadrature error estimate is honest on smooth integrands") {
    auto f = [](double x) { return std::log(x) / (1.0 + x * x); };
    const auto r = integrate(f, 1.0, 50.0, 1e-12);
    // Compare against a much finer run.
    const auto fine = integrate(f, 1.0, 50.0, 1e-15, 0.0, 20000);
    CHECK(std::abs(r.value - fine.value) <= 1e-10 * std::max(1.0, std::abs(fine.value)));
}
