#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <map>
#include <numeric>
#include <vector>

#include "mertens/characters.hpp"
#include "mertens/numeric.hpp"

using namespace mertens::chars;

namespace {

// Oracle: multiplicative order of g mod m by direct iteration.
std::uint64_t naive_order(std::uint64_t g, std::uint64_t m) {
    std::uint64_t v = g % m, t = 1;
    while (v != 1) {
        v = v * g % m;
        ++t;
        REQUIRE(t <= m);
    }
    return t;
}

// Oracle: smallest modulus f | q from which chi is induced, by definition:
// chi(n) = 1 for every n == 1 (mod f) with gcd(n, q) = 1.
std::uint64_t induction_conductor(const DirichletCharacter& chi) {
    const std::uint64_t q = chi.modulus();
    for (std::uint64_t fcand = 1; fcand <= q; ++fcand) {
        if (q % fcand != 0) continue;
        bool induced = true;
        for (std::uint64_t n = 1; n <= q; n += fcand) {
            if (std::gcd(n, q) != 1) continue;
            const auto a = chi.angle(n);
            if (!a || a->num != 0) {
                induced = false;
                break;
            }
        }
        if (induced) return fcand;
    }
    return q;
}

}  // namespace

TEST_CASE("unit group decompositions match hand-checked cases") {
    SUBCASE("q = 4") {
        const auto d = decompose_units(4);
        REQUIRE(d->factors() == 1);
        CHECK(d->orders[0] == 2);
        CHECK(d->generators[0] == 3);
        CHECK(d->phi == 2);
    }
    SUBCASE("q = 8") {
        const auto d = decompose_units(8);
        REQUIRE(d->factors() == 2);
        CHECK(d->orders == std::vector<std::uint64_t>{2, 2});
        CHECK(d->generators == std::vector<std::uint64_t>{7, 5});
    }
    SUBCASE("q = 1") {
        const auto d = decompose_units(1);
        CHECK(d->factors() == 0);
        CHECK(d->phi == 1);
    }
    SUBCASE("q = 16") {
        const auto d = decompose_units(16);
        REQUIRE(d->factors() == 2);
        CHECK(d->orders == std::vector<std::uint64_t>{2, 4});
        CHECK(d->generators == std::vector<std::uint64_t>{15, 5});
    }
}

TEST_CASE("generators have exactly their stated orders, orders multiply to phi") {
    for (std::uint64_t q = 1; q <= 200; ++q) {
        const auto d = decompose_units(q);
        std::uint64_t product = 1;
        for (std::size_t i = 0; i < d->factors(); ++i) {
            REQUIRE(naive_order(d->generators[i], q) == d->orders[i]);
            product *= d->orders[i];
        }
        REQUIRE(product == d->phi);
        REQUIRE(d->phi == mertens::num::totient(q));
    }
}

TEST_CASE("dlog of generator i is the i-th unit vector") {
    for (std::uint64_t q : {5ull, 8ull, 12ull, 16ull, 45ull, 120ull}) {
        const auto d = decompose_units(q);
        for (std::size_t i = 0; i < d->factors(); ++i) {
            const auto idx = d->unit_index(d->generators[i]);
            REQUIRE(idx >= 0);
            const auto* row = d->dlog_row(static_cast<std::size_t>(idx));
            for (std::size_t j = 0; j < d->factors(); ++j)
                REQUIRE(row[j] == (i == j ? 1u : 0u));
        }
    }
}

TEST_CASE("characters_mod yields phi(q) distinct characters, principal first") {
    for (std::uint64_t q = 1; q <= 100; ++q) {
        const auto chars = characters_mod(q);
        REQUIRE(chars.size() == mertens::num::totient(q));
        CHECK(chars.front().is_principal());
        for (std::size_t i = 1; i < chars.size(); ++i) CHECK_FALSE(chars[i].is_principal());
        // Distinctness via exponent vectors.
        for (std::size_t i = 0; i < chars.size(); ++i)
            for (std::size_t j = i + 1; j < chars.size(); ++j)
                REQUIRE_FALSE(chars[i] == chars[j]);
    }
}

TEST_CASE("complete multiplicativity and vanishing on non-units") {
    for (std::uint64_t q = 1; q <= 50; ++q) {
        for (const auto& chi : characters_mod(q)) {
            for (std::uint64_t m = 0; m <= q + 3; ++m) {
                for (std::uint64_t n = 0; n <= q + 3; ++n) {
                    const auto lhs = chi.eval(m * n);
                    const auto rhs = chi.eval(m) * chi.eval(n);
                    REQUIRE(std::abs(lhs - rhs) <= 1e-12);
                }
            }
            for (std::uint64_t n = 0; n <= 2 * q; ++n) {
                const bool unit = (q == 1) || std::gcd(n % q == 0 ? q : n % q, q) == 1;
                REQUIRE((std::abs(chi.eval(n)) < 1e-15) == !unit);
            }
        }
    }
}

TEST_CASE("hand-checked character values") {
    SUBCASE("principal mod 6 at 5") {
        const auto chars = characters_mod(6);
        CHECK(std::abs(chars[0].eval(5) - std::complex<double>{1, 0}) < 1e-15);
    }
    SUBCASE("nonprincipal mod 4") {
        const auto chars = characters_mod(4);
        REQUIRE(chars.size() == 2);
        CHECK(std::abs(chars[1].eval(3) - std::complex<double>{-1, 0}) < 1e-15);
        CHECK(std::abs(chars[1].eval(2)) == 0.0);
    }
    SUBCASE("mod 5 has an order-4 character with chi(2) = +-i") {
        bool found = false;
        for (const auto& chi : characters_mod(5)) {
            const auto v = chi.eval(2);
            if (std::abs(v.real()) < 1e-15 && std::abs(std::abs(v.imag()) - 1.0) < 1e-15) {
                found = true;
                CHECK(chi.order() == 4);
                // chi(3)^4 = 1 and |chi(3)| = 1
                const auto w = chi.eval(3);
                CHECK(std::abs(std::pow(w, 4) - std::complex<double>{1, 0}) < 1e-12);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("orthogonality over the dual group") {
    // sum over chi of conj(chi(m)) chi(n) = phi(q) iff m == n (mod q) and
    // gcd(m, q) = 1, else 0.
    for (std::uint64_t q = 1; q <= 60; ++q) {
        const auto chars = characters_mod(q);
        const double phi = static_cast<double>(mertens::num::totient(q));
        for (std::uint64_t m = 1; m <= q; ++m) {
            for (std::uint64_t n = 1; n <= q; ++n) {
                std::complex<double> sum = 0;
                for (const auto& chi : chars)
                    sum += std::conj(chi.eval(m)) * chi.eval(n);
                const bool hit =
                    std::gcd(m, q) == 1 && (m % q) == (n % q);
                const std::complex<double> expect = hit ? phi : 0.0;
                REQUIRE(std::abs(sum - expect) <= 1e-12 * std::max(1.0, phi));
            }
        }
    }
}

TEST_CASE("orthogonality over residues") {
    // sum over m <= q of conj(chi(m)) = phi(q) for principal chi, else 0.
    for (std::uint64_t q = 1; q <= 60; ++q) {
        for (const auto& chi : characters_mod(q)) {
            std::complex<double> sum = 0;
            for (std::uint64_t m = 1; m <= q; ++m) sum += std::conj(chi.eval(m));
            const std::complex<double> expect =
                chi.is_principal() ? static_cast<double>(mertens::num::totient(q)) : 0.0;
            REQUIRE(std::abs(sum - expect) <= 1e-12 * static_cast<double>(q));
        }
    }
}

TEST_CASE("closure under pointwise product") {
    for (std::uint64_t q : {12ull, 15ull, 16ull, 21ull}) {
        const auto chars = characters_mod(q);
        for (const auto& a : chars) {
            for (const auto& b : chars) {
                const auto prod = a * b;
                bool in_list = false;
                for (const auto& c : chars)
                    if (c == prod) { in_list = true; break; }
                REQUIRE(in_list);
            }
        }
    }
}

TEST_CASE("conjugation negates angles") {
    for (std::uint64_t q : {5ull, 7ull, 9ull, 16ull, 40ull}) {
        for (const auto& chi : characters_mod(q)) {
            const auto bar = chi.conjugate();
            for (std::uint64_t n = 1; n <= q; ++n) {
                const auto v = chi.eval(n);
                const auto w = bar.eval(n);
                REQUIRE(std::abs(w - std::conj(v)) <= 1e-14);
            }
        }
    }
}

TEST_CASE("conductor matches the exhaustive induction oracle") {
    for (std::uint64_t q = 1; q <= 72; ++q) {
        for (const auto& chi : characters_mod(q)) {
            const auto pd = conductor_and_primitive(chi);
            REQUIRE(pd.conductor == induction_conductor(chi));
            REQUIRE(q % pd.conductor == 0);
        }
    }
}

TEST_CASE("primitive lift reproduces chi on units") {
    for (std::uint64_t q : {8ull, 12ull, 16ull, 24ull, 36ull, 45ull, 60ull}) {
        for (const auto& chi : characters_mod(q)) {
            const auto pd = conductor_and_primitive(chi);
            // chi(n) = chi*(n) for every n coprime to q.
            for (std::uint64_t n = 1; n <= 3 * q; ++n) {
                if (std::gcd(n, q) != 1) continue;
                REQUIRE(std::abs(chi.eval(n) - pd.character.eval(n)) <= 1e-13);
            }
            // chi* is itself primitive.
            const auto pd2 = conductor_and_primitive(pd.character);
            REQUIRE(pd2.conductor == pd.conductor);
        }
    }
}

TEST_CASE("hand-checked conductors") {
    SUBCASE("principal mod 12 has conductor 1") {
        const auto chars = characters_mod(12);
        CHECK(conductor_and_primitive(chars[0]).conductor == 1);
    }
    SUBCASE("mod-8 character induced from mod 4") {
        for (const auto& chi : characters_mod(8)) {
            if (chi.is_principal()) continue;
            const auto pd = conductor_and_primitive(chi);
            // chi(5) = 1, chi(7) = -1 identifies the lift of the mod-4 character.
            if (std::abs(chi.eval(5) - std::complex<double>{1, 0}) < 1e-15 &&
                std::abs(chi.eval(7) - std::complex<double>{-1, 0}) < 1e-15)
                CHECK(pd.conductor == 4);
        }
    }
    SUBCASE("primitive characters mod 5") {
        for (const auto& chi : characters_mod(5)) {
            if (chi.is_principal()) continue;
            CHECK(conductor_and_primitive(chi).conductor == 5);
        }
    }
}

TEST_CASE("angle_index agrees with eval through the root table") {
    for (std::uint64_t q : {7ull, 9ull, 15ull, 16ull, 35ull}) {
        const auto group = decompose_units(q);
        const auto table = root_table(group->exponent);
        for (const auto& chi : characters_mod(q)) {
            for (std::size_t i = 0; i < group->residues.size(); ++i) {
                const auto via_table = table[chi.angle_index(i)];
                const auto direct = chi.eval(group->residues[i]);
                REQUIRE(std::abs(via_table - direct) <= 1e-14);
            }
        }
    }
}

TEST_CASE("real characters are exactly the self-conjugate ones") {
    for (std::uint64_t q = 1; q <= 40; ++q) {
        for (const auto& chi : characters_mod(q)) {
            bool self_conj = chi == chi.conjugate();
            CHECK(chi.is_real() == self_conj);
        }
    }
}
