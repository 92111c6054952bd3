#include "mertens/characters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "mertens/numeric.hpp"

namespace mertens::chars {

namespace {

// Smallest primitive root mod p^k for odd prime p: candidate g has order
// phi(p^k) iff g^(phi/l) != 1 for every prime l | phi.
std::uint64_t smallest_primitive_root(std::uint64_t pk, std::uint64_t phi) {
    const std::vector<std::uint64_t> phi_primes = num::prime_factors(phi);
    for (std::uint64_t g = 2; g < pk; ++g) {
        if (std::gcd(g, pk) != 1) continue;
        bool primitive = true;
        for (std::uint64_t l : phi_primes) {
            if (num::powmod(g, phi / l, pk) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
    throw std::logic_error("no primitive root found (modulus not an odd prime power?)");
}

// CRT lift: r == value mod m, r == 1 mod q/m (m a prime-power factor of q).
std::uint64_t crt_lift(std::uint64_t value, std::uint64_t m, std::uint64_t q) {
    const std::uint64_t rest = q / m;
    for (std::uint64_t r = value; r < q + value; r += m) {
        const std::uint64_t rr = r % q;
        if (rr % rest == 1 % rest) return rr;
    }
    throw std::logic_error("crt lift failed");
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace

std::shared_ptr<const UnitGroupDecomposition> decompose_units(std::uint64_t q) {
    if (q == 0) throw std::invalid_argument("decompose_units: q must be positive");
    auto out = std::make_shared<UnitGroupDecomposition>();
    auto& d = *out;
    d.q = q;
    d.phi = num::totient(q);

    struct Component {
        std::uint64_t generator;  // mod component_mod
        std::uint64_t order;
        std::uint64_t component_mod;
    };
    std::vector<Component> comps;

    // Factor q into prime powers.
    std::uint64_t rest = q;
    std::uint64_t two_exp = 0;
    while (rest % 2 == 0) { rest /= 2; ++two_exp; }
    if (two_exp == 2) {
        comps.push_back({3, 2, 4});
    } else if (two_exp >= 3) {
        const std::uint64_t m = 1ull << two_exp;
        comps.push_back({m - 1, 2, m});                      // <-1>
        comps.push_back({5, 1ull << (two_exp - 2), m});      // <5>
    }
    for (std::uint64_t p = 3; p * p <= rest; p += 2) {
        if (rest % p != 0) continue;
        std::uint64_t pk = 1;
        while (rest % p == 0) { rest /= p; pk *= p; }
        const std::uint64_t phi_pk = pk / p * (p - 1);
        comps.push_back({smallest_primitive_root(pk, phi_pk), phi_pk, pk});
    }
    if (rest > 1) {
        const std::uint64_t p = rest;
        comps.push_back({smallest_primitive_root(p, p - 1), p - 1, p});
    }

    d.exponent = 1;
    for (const auto& c : comps) {
        d.generators.push_back(q == c.component_mod
                                   ? c.generator
                                   : crt_lift(c.generator, c.component_mod, q));
        d.orders.push_back(c.order);
        d.component_mod.push_back(c.component_mod);
        d.exponent = std::lcm(d.exponent, c.order);
    }

    // Units and their indices.
    d.index_of.assign(q, -1);
    d.residues.reserve(d.phi);
    for (std::uint64_t r = 0; r < q; ++r) {
        if (std::gcd(r == 0 ? q : r, q) == 1) {
            d.index_of[r] = static_cast<std::int32_t>(d.residues.size());
            d.residues.push_back(r);
        }
    }
    if (q == 1) {
        d.index_of[0] = 0;  // every integer is 0 mod 1 and counts as a unit
        d.residues.assign(1, 0);
    }

    // Discrete logs: one multiplicative sweep per factor over the component
    // modulus, then a gather per unit.
    const std::size_t k = comps.size();
    d.dlog.assign(d.residues.size() * k, 0);
    for (std::size_t c = 0; c < k; ++c) {
        const std::uint64_t m = comps[c].component_mod;
        std::vector<std::uint32_t> table(m, 0);
        std::uint64_t v = 1;
        for (std::uint64_t t = 0; t < comps[c].order; ++t) {
            table[v] = static_cast<std::uint32_t>(t);
            v = v * comps[c].generator % m;
        }
        if (two_exp >= 3 && c == 1) {
            // The <5> sweep only reaches half the units mod 2^k; the other
            // half is -5^t, which shares the same <5>-exponent t.
            std::uint64_t w = 1;
            for (std::uint64_t t = 0; t < comps[c].order; ++t) {
                table[m - w] = static_cast<std::uint32_t>(t);
                w = w * 5 % m;
            }
        }
        for (std::size_t i = 0; i < d.residues.size(); ++i)
            d.dlog[i * k + c] = table[d.residues[i] % m];
    }

    // For 2^k (k >= 3) the <-1> exponent is not produced by a sweep: r is
    // +5^t or -5^t mod 2^k; the sign decides the first coordinate.
    if (two_exp >= 3) {
        const std::uint64_t m = 1ull << two_exp;
        std::vector<bool> plus_coset(m, false);
        std::uint64_t v = 1;
        for (std::uint64_t t = 0; t < (m >> 2); ++t) {
            plus_coset[v] = true;
            v = v * 5 % m;
        }
        for (std::size_t i = 0; i < d.residues.size(); ++i)
            d.dlog[i * k + 0] = plus_coset[d.residues[i] % m] ? 0 : 1;
    }

    return out;
}

DirichletCharacter::DirichletCharacter(
    std::shared_ptr<const UnitGroupDecomposition> group,
    std::vector<std::uint64_t> exponents)
    : group_(std::move(group)), exponents_(std::move(exponents)) {
    if (exponents_.size() != group_->factors())
        throw std::invalid_argument("DirichletCharacter: exponent arity mismatch");
    scale_.resize(exponents_.size());
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        exponents_[i] %= group_->orders[i];
        scale_[i] = group_->exponent / group_->orders[i];
    }
}

bool DirichletCharacter::is_principal() const {
    return std::all_of(exponents_.begin(), exponents_.end(),
                       [](std::uint64_t e) { return e == 0; });
}

bool DirichletCharacter::is_real() const {
    for (std::size_t i = 0; i < exponents_.size(); ++i)
        if ((2 * exponents_[i]) % group_->orders[i] != 0) return false;
    return true;
}

std::uint64_t DirichletCharacter::order() const {
    std::uint64_t ord = 1;
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        const std::uint64_t oi =
            group_->orders[i] / std::gcd(group_->orders[i], exponents_[i]);
        ord = std::lcm(ord, oi);
    }
    return ord;
}

std::uint64_t DirichletCharacter::angle_index(std::size_t unit_index) const {
    const std::uint32_t* row = group_->dlog_row(unit_index);
    const std::uint64_t L = group_->exponent;
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < exponents_.size(); ++i)
        t = (t + exponents_[i] % L * (row[i] % L) % L * scale_[i]) % L;
    return t;
}

std::optional<RationalAngle> DirichletCharacter::angle(std::uint64_t n) const {
    const std::int32_t idx = group_->unit_index(n);
    if (idx < 0) return std::nullopt;
    const std::uint64_t t = angle_index(static_cast<std::size_t>(idx));
    const std::int64_t g =
        gcd64(static_cast<std::int64_t>(t), static_cast<std::int64_t>(group_->exponent));
    return RationalAngle{static_cast<std::int64_t>(t) / g,
                         static_cast<std::int64_t>(group_->exponent) / g};
}

std::complex<double> DirichletCharacter::eval(std::uint64_t n) const {
    const auto a = angle(n);
    if (!a) return {0.0, 0.0};
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(a->num) / static_cast<double>(a->den);
    return {std::cos(theta), std::sin(theta)};
}

DirichletCharacter DirichletCharacter::conjugate() const {
    std::vector<std::uint64_t> e(exponents_.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = (group_->orders[i] - exponents_[i]) % group_->orders[i];
    return DirichletCharacter(group_, std::move(e));
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& other) const {
    if (group_->q != other.group_->q)
        throw std::invalid_argument("character product: modulus mismatch");
    std::vector<std::uint64_t> e(exponents_.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = (exponents_[i] + other.exponents_[i]) % group_->orders[i];
    return DirichletCharacter(group_, std::move(e));
}

bool DirichletCharacter::operator==(const DirichletCharacter& other) const {
    return group_->q == other.group_->q && exponents_ == other.exponents_;
}

std::vector<DirichletCharacter> characters_mod(std::uint64_t q) {
    const auto group = decompose_units(q);
    std::vector<DirichletCharacter> out;
    out.reserve(group->phi);
    std::vector<std::uint64_t> e(group->factors(), 0);
    while (true) {
        out.emplace_back(group, e);
        // Odometer increment; the all-zero (principal) vector comes first.
        std::size_t i = 0;
        for (; i < e.size(); ++i) {
            if (++e[i] < group->orders[i]) break;
            e[i] = 0;
        }
        if (i == e.size()) break;
    }
    if (out.size() != group->phi)
        throw std::logic_error("characters_mod: enumeration size mismatch");
    return out;
}

PrimitiveDescriptor conductor_and_primitive(const DirichletCharacter& chi) {
    const auto& g = chi.group();
    const std::uint64_t q = g.q;

    // The conductor is multiplicative over the prime-power components.
    std::uint64_t f = 1;
    std::size_t i = 0;
    while (i < g.factors()) {
        const std::uint64_t m = g.component_mod[i];
        if (m % 2 == 0 && i + 1 < g.factors() && g.component_mod[i + 1] == m) {
            // 2^k with k >= 3: exponents (e1 on -1, e2 on 5). A nonzero
            // 5-part of 2-adic valuation v has conductor 2^{k-v} (>= 8);
            // the -1 part alone is the conductor-4 character lifted.
            const std::uint64_t e1 = chi.exponents()[i];
            const std::uint64_t e2 = chi.exponents()[i + 1];
            if (e2 != 0) {
                std::uint64_t v = 0, ee = e2;
                while (ee % 2 == 0) { ee /= 2; ++v; }
                f *= (m >> v);
            } else if (e1 != 0) {
                f *= 4;
            }
            i += 2;
            continue;
        }
        const std::uint64_t e = chi.exponents()[i];
        if (e != 0) {
            if (m == 4) {
                f *= 4;
            } else {
                // Odd prime power p^k: conductor p^{k - v_p(e)}.
                const std::uint64_t p = num::prime_factors(m).front();
                std::uint64_t v = 0, ee = e;
                while (ee % p == 0) { ee /= p; ++v; }
                std::uint64_t cond = m;
                for (std::uint64_t j = 0; j < v; ++j) cond /= p;
                f *= cond;
            }
        }
        ++i;
    }

    // Build the primitive character by matching chi's values on the
    // generators of the conductor group.
    auto fgroup = decompose_units(f);
    std::vector<std::uint64_t> exps(fgroup->factors(), 0);
    for (std::size_t j = 0; j < fgroup->factors(); ++j) {
        // Lift the generator to a residue mod q coprime to q.
        std::uint64_t n = fgroup->generators[j];
        while (std::gcd(n, q) != 1) n += f;
        const auto a = chi.angle(n);
        if (!a) throw std::logic_error("conductor_and_primitive: lift not coprime");
        // angle = e*_j / orders[j]  =>  e*_j = angle * orders[j]
        const std::int64_t ord = static_cast<std::int64_t>(fgroup->orders[j]);
        if ((a->num * ord) % a->den != 0)
            throw std::logic_error("conductor_and_primitive: incompatible angle");
        std::int64_t e = (a->num * ord / a->den) % ord;
        if (e < 0) e += ord;
        exps[j] = static_cast<std::uint64_t>(e);
    }
    return PrimitiveDescriptor{f, DirichletCharacter(std::move(fgroup), std::move(exps))};
}

std::vector<std::complex<double>> root_table(std::uint64_t den) {
    std::vector<std::complex<double>> out(den);
    for (std::uint64_t t = 0; t < den; ++t) {
        const double theta =
            2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(den);
        out[t] = {std::cos(theta), std::sin(theta)};
    }
    return out;
}

}  // namespace mertens::chars
