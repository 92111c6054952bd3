#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "mertens/ap_constants.hpp"
#include "mertens/mertens_sums.hpp"
#include "mertens/numeric.hpp"
#include "mertens/sieve.hpp"

namespace sums = mertens::sums;
namespace sieve = mertens::sieve;
namespace ap = mertens::ap;
namespace num = mertens::num;

namespace {

const std::shared_ptr<const sieve::PrimeTable>& table() {
    static const auto t = std::make_shared<const sieve::PrimeTable>(
        sieve::PrimeTable::build(10'000'000));
    return t;
}

// Independent plain bool-array sieve for oracle sums.
const std::vector<bool>& bool_sieve() {
    static const std::vector<bool> flags = [] {
        std::vector<bool> f(1'000'001, true);
        f[0] = f[1] = false;
        for (std::size_t i = 2; i * i < f.size(); ++i)
            if (f[i])
                for (std::size_t j = i * i; j < f.size(); j += i) f[j] = false;
        return f;
    }();
    return flags;
}

double oracle_sum_recip(double x, std::uint64_t q, std::uint64_t a) {
    num::KahanSum s;
    for (std::uint64_t p = 2; p <= static_cast<std::uint64_t>(x); ++p)
        if (bool_sieve()[p] && p % q == a % q) s.add(1.0 / double(p));
    return s.value();
}

double oracle_product_log(double x, std::uint64_t q, std::uint64_t a) {
    num::KahanSum s;
    for (std::uint64_t p = 2; p <= static_cast<std::uint64_t>(x); ++p)
        if (bool_sieve()[p] && p % q == a % q) s.add(-std::log1p(-1.0 / double(p)));
    return s.value();
}

std::uint64_t oracle_pi(double t) {
    std::uint64_t c = 0;
    for (std::uint64_t p = 2; p <= static_cast<std::uint64_t>(t); ++p)
        if (bool_sieve()[p]) ++c;
    return c;
}

}  // namespace

TEST_CASE("partial sums match an independent bool-array sieve") {
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> targets = {
        {1, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 3}, {12, 5}};
    for (double x : {10.0, 1000.0, 1e6}) {
        for (auto [q, a] : targets) {
            sieve::APTarget t(q, a);
            CHECK(std::abs(sums::partial_sum_recip(*table(), x, t) -
                           oracle_sum_recip(x, q, a)) <= 1e-13);
            CHECK(std::abs(sums::partial_product_log(*table(), x, t) -
                           oracle_product_log(x, q, a)) <= 1e-13);
        }
    }
    CHECK(sums::partial_sum_recip(*table(), 10.0, sieve::APTarget(4, 1)) == 0.2);
    const double first_four =
        sums::partial_sum_recip(*table(), 10.0, sieve::APTarget(1, 1));
    CHECK(std::abs(first_four - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)) <= 1e-15);
    // Classical magnitude: loglog 10^6 + 0.26149... = 2.88732...
    CHECK(std::abs(sums::partial_sum_recip(*table(), 1e6, sieve::APTarget(1, 1)) -
                   2.8873281) <= 1e-5);
    CHECK(sums::partial_sum_recip(*table(), 1.5, sieve::APTarget(1, 1)) == 0.0);
    CHECK_THROWS_AS(sums::partial_sum_recip(*table(), 1e12, sieve::APTarget(1, 1)),
                    sieve::RangeError);
}

TEST_CASE("partial sums are invariant under sieve configuration") {
    const auto a = sieve::PrimeTable::build(200'000, 1 << 12, 1);
    const auto b = sieve::PrimeTable::build(200'000, 1 << 18, 2);
    for (auto [q, r] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {1, 1}, {3, 2}, {8, 5}}) {
        sieve::APTarget t(q, r);
        CHECK(sums::partial_sum_recip(a, 150'000.0, t) ==
              sums::partial_sum_recip(b, 150'000.0, t));
        CHECK(sums::partial_product_log(a, 150'000.0, t) ==
              sums::partial_product_log(b, 150'000.0, t));
    }
}

TEST_CASE("partial summation closes to rounding noise") {
    CHECK(sums::abel_identity_residual(*table(), 10.0, sieve::APTarget(4, 1)) <=
          1e-15);
    for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {1, 1}, {3, 2}, {7, 5}, {12, 11}, {30, 7}}) {
        CHECK(sums::abel_identity_residual(*table(), 1e6, sieve::APTarget(q, a)) <=
              1e-10);
        CHECK(sums::abel_identity_residual(*table(), 1e7, sieve::APTarget(q, a)) <=
              1e-8);
    }
}

TEST_CASE("error integral: empty at X=2 and matching quadrature on step data") {
    CHECK(sums::error_integral(*table(), 2.0, sieve::APTarget(1, 1)) == 0.0);
    // Quadrature oracle integrates t^{-2} (pi(t;q,a) - li(t)/phi) directly.
    for (auto [X, q, a] : std::vector<std::tuple<double, std::uint64_t, std::uint64_t>>{
             {10.0, 1, 1}, {100.0, 4, 3}, {50.0, 3, 1}}) {
        sieve::APTarget t(q, a);
        const double phi = double(t.phi());
        const auto quad = num::integrate(
            [&](double u) {
                std::uint64_t c = 0;
                for (std::uint64_t p = 2; p <= static_cast<std::uint64_t>(u); ++p)
                    if (bool_sieve()[p] && p % q == a % q) ++c;
                return (double(c) - sieve::li(u) / phi) / (u * u);
            },
            2.0, X, 1e-8, 1e-10, 20000);
        CHECK(std::abs(sums::error_integral(*table(), X, t) - quad.value) <= 1e-6);
    }
}

TEST_CASE("error integral converges toward g + loglog(2)/phi") {
    ap::ConstantsCalculator calc(table());
    for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {1, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 3}, {12, 1}, {12, 11}}) {
        sieve::APTarget t(q, a);
        const double goal = calc.g_constant(q, a, 10'000'000) +
                            std::log(std::log(2.0)) / double(t.phi());
        const double early = sums::error_integral(*table(), 1e4, t) - goal;
        const double late = sums::error_integral(*table(), 1e7, t) - goal;
        CHECK(std::abs(late) < std::abs(early));
        CHECK(std::abs(late) <= 1e-2);
    }
}

TEST_CASE("finite-data partial-summation row closes algebraically") {
    for (auto [x, Xt, q, a] :
         std::vector<std::tuple<double, double, std::uint64_t, std::uint64_t>>{
             {1e5, 1e7, 3, 2}, {10.0, 100.0, 1, 1}, {1e4, 1e6, 5, 3},
             {1e4, 1e6, 8, 7}, {1e4, 1e6, 12, 7}, {317.0, 40111.0, 7, 6}}) {
        const auto row =
            sums::identity_closure_report(*table(), x, Xt, sieve::APTarget(q, a));
        CHECK(std::abs(row.residual_sum) <= 1e-10);
        CHECK(row.residual_sum == row.sum_recip - row.predicted_sum);
        CHECK(row.product_log == 0.0);
    }
    CHECK_THROWS_AS(
        sums::identity_closure_report(*table(), 100.0, 10.0, sieve::APTarget(1, 1)),
        sieve::RangeError);
}

TEST_CASE("truncated error integral reproduces g to visual accuracy") {
    ap::ConstantsCalculator calc(table());
    for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {3, 2}, {1, 1}, {4, 1}}) {
        sieve::APTarget t(q, a);
        const double g_hat =
            sums::error_integral(*table(), 1e7, t) -
            std::log(std::log(2.0)) / double(t.phi());
        CHECK(std::abs(g_hat - calc.g_constant(q, a, 10'000'000)) <= 1e-2);
    }
}

TEST_CASE("product report rows carry both asymptotic laws") {
    ap::ConstantsCalculator calc(table());
    {
        sieve::APTarget t(4, 1);
        const auto row = sums::product_report(*table(), 10.0, t,
                                              calc.constants(4, 1, 1'000'000));
        CHECK(row.product_log == -std::log1p(-0.2));  // single factor p=5
        CHECK(row.residual_sum == row.sum_recip - row.predicted_sum);
        CHECK(row.residual_product == row.product_log - row.predicted_product_log);
    }
    for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {1, 1}, {4, 1}, {3, 2}}) {
        const auto row = sums::product_report(
            *table(), 1e7, sieve::APTarget(q, a), calc.constants(q, a, 10'000'000));
        CHECK(std::abs(row.residual_product) <= 2e-2);
        CHECK(std::abs(row.residual_sum) <= 2e-2);
    }
    CHECK_THROWS_AS(
        sums::product_report(*table(), 100.0, sieve::APTarget(3, 2),
                             calc.constants(3, 1, 1'000'000)),
        std::invalid_argument);
}

TEST_CASE("degeneration probe: exact regime at q >= x") {
    {
        const auto p = sums::large_modulus_probe(*table(), 30.0, sieve::APTarget(50, 3));
        CHECK(p.exact_case);
        CHECK(p.sum_value == p.g_star);  // single prime p = 3
        CHECK(std::abs(p.product_value - p.G_star) <= 1e-13);
        CHECK(p.lower_holds);
        CHECK(p.sum_constant == 0.0);
        CHECK(p.upper_c <= 1e-12);
    }
    {
        const auto p = sums::large_modulus_probe(*table(), 30.0, sieve::APTarget(50, 9));
        CHECK(p.exact_case);
        CHECK(p.sum_value == 0.0);
        CHECK(p.g_star == 0.0);
        CHECK(p.product_value == 1.0);
        CHECK(p.G_star == 1.0);
        CHECK(p.lower_holds);
    }
}

TEST_CASE("degeneration probe: implied constants stay small for q < x") {
    for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {10, 3}, {5, 2}, {10000, 3}}) {
        const auto p = sums::large_modulus_probe(*table(), 1e6, sieve::APTarget(q, a));
        CHECK_FALSE(p.exact_case);
        CHECK(p.lower_holds);
        CHECK(p.sum_constant <= 10.0);
        CHECK(p.upper_c <= 10.0);
    }
}

TEST_CASE("batched checkpoint accumulation equals single-target sums exactly") {
    const std::vector<double> xs = {1e3, 1e4, 1e5};
    std::vector<sieve::APTarget> targets = {
        sieve::APTarget(1, 1), sieve::APTarget(3, 2), sieve::APTarget(4, 1),
        sieve::APTarget(5, 4)};
    const auto batch = sums::accumulate_checkpoints(*table(), xs, targets);
    REQUIRE(batch.sum_recip.size() == targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            CHECK(batch.sum_recip[i][k] ==
                  sums::partial_sum_recip(*table(), xs[k], targets[i]));
            CHECK(batch.product_log[i][k] ==
                  sums::partial_product_log(*table(), xs[k], targets[i]));
        }
    }
    CHECK_THROWS_AS(
        sums::accumulate_checkpoints(*table(), {1e4, 1e3}, targets),
        std::invalid_argument);
    CHECK_THROWS_AS(sums::accumulate_checkpoints(*table(), {}, targets),
                    std::invalid_argument);
    CHECK_THROWS_AS(sums::accumulate_checkpoints(*table(), {1e12}, targets),
                    sieve::RangeError);
}
