#pragma once

// Dirichlet characters mod q, built on the cyclic decomposition of the unit
// group (Z/qZ)*. Character values are exact roots of unity represented by
// rational angles (the exponent of e^{2*pi*i}), so conjugation is negation
// and orthogonality sums cancel to rounding error only.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace mertens::chars {

// Reduced rational in [0, 1) representing the angle t = num/den of a root of
// unity e^{2*pi*i*t}.
struct RationalAngle {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

// Cyclic decomposition of (Z/qZ)*:
//   - each odd prime power p^k contributes one factor generated by the
//     smallest primitive root mod p^k;
//   - 2^k contributes nothing for k <= 1, one factor <3> of order 2 for
//     k = 2, and the pair <-1> x <5> (orders 2 and 2^{k-2}) for k >= 3.
// Generators are CRT-lifted to residues mod q; discrete logs are tabulated
// by one multiplicative sweep per factor.
struct UnitGroupDecomposition {
    std::uint64_t q = 1;
    std::uint64_t phi = 1;
    std::uint64_t exponent = 1;  // lcm of factor orders (1 for q <= 2)
    std::vector<std::uint64_t> generators;       // lifted generators mod q
    std::vector<std::uint64_t> orders;           // factor orders
    std::vector<std::uint64_t> component_mod;    // prime-power modulus per factor
    std::vector<std::uint64_t> residues;         // units mod q, ascending
    std::vector<std::int32_t> index_of;          // size q; -1 for non-units
    std::vector<std::uint32_t> dlog;             // phi * k, row per unit

    std::size_t factors() const { return generators.size(); }
    // Exponent vector of residue r (which must be a unit mod q).
    const std::uint32_t* dlog_row(std::size_t unit_index) const {
        return dlog.data() + unit_index * factors();
    }
    std::int32_t unit_index(std::uint64_t n) const {
        return q == 1 ? 0 : index_of[n % q];
    }
};

std::shared_ptr<const UnitGroupDecomposition> decompose_units(std::uint64_t q);

class DirichletCharacter {
public:
    DirichletCharacter(std::shared_ptr<const UnitGroupDecomposition> group,
                       std::vector<std::uint64_t> exponents);

    std::uint64_t modulus() const { return group_->q; }
    const UnitGroupDecomposition& group() const { return *group_; }
    const std::vector<std::uint64_t>& exponents() const { return exponents_; }

    bool is_principal() const;
    bool is_real() const;   // chi = conj(chi), i.e. all values in {0, +-1}
    std::uint64_t order() const;

    // chi(n): exact angle (nullopt when gcd(n, q) > 1) and complex value.
    std::optional<RationalAngle> angle(std::uint64_t n) const;
    std::complex<double> eval(std::uint64_t n) const;

    // Angle numerator in units of 1/group().exponent, by unit index; the
    // fast path for whole-group sweeps (pair with root_table()).
    std::uint64_t angle_index(std::size_t unit_index) const;

    DirichletCharacter conjugate() const;
    DirichletCharacter operator*(const DirichletCharacter& other) const;
    bool operator==(const DirichletCharacter& other) const;

private:
    std::shared_ptr<const UnitGroupDecomposition> group_;
    std::vector<std::uint64_t> exponents_;  // e_i mod orders[i]
    std::vector<std::uint64_t> scale_;      // exponent/orders[i], premultiplied
};

// All phi(q) characters mod q, principal first, deterministic order.
std::vector<DirichletCharacter> characters_mod(std::uint64_t q);

// Smallest f | q such that chi is induced by a (primitive) character mod f,
// together with that primitive character.
struct PrimitiveDescriptor {
    std::uint64_t conductor = 1;
    DirichletCharacter character;
};
PrimitiveDescriptor conductor_and_primitive(const DirichletCharacter& chi);

// exp(2*pi*i*t/den) for t in [0, den): shared table for angle_index sweeps.
std::vector<std::complex<double>> root_table(std::uint64_t den);

}  // namespace mertens::chars
