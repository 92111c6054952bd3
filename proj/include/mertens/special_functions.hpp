#pragma once

// Special functions feeding the constants layer: the Euler-Mascheroni
// constant, digamma at rational arguments, Gamma on (0,1], Dirichlet L(1,chi),
// and the branch of log L(s,chi) that is real where L is positive on the real
// axis sigma > 1, continued continuously down to s = 1.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mertens/characters.hpp"

namespace mertens::sf {

// Internal-consistency failure (branch tracking, anchor mismatch, ...);
// mapped to a dedicated exit code by the CLI.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 0.5772156649015328... (stored constant; see harmonic_gamma_estimate for the
// limit-definition cross-check sum_{k<=n} 1/k - log n).
double euler_gamma();
double harmonic_gamma_estimate(std::uint64_t n);

// psi(num/den) for a rational argument in (0, 1], to absolute accuracy 1e-12:
// recurrence shift to argument >= 10, then the asymptotic Bernoulli series.
double digamma(std::int64_t num, std::int64_t den);

// Gamma(s) for s in (0, 1] to relative accuracy 1e-12.
double gamma_fn(double s);

// | integral_eta^inf u^{-1} e^{-delta u} du - (log(1/delta) - log eta - gamma) |
// with the integral evaluated by adaptive quadrature (tail cut at u = 50/delta).
// The defect is O(delta * eta) as delta -> 0.
double tail_quadrature_residual(double eta, double delta);

struct BranchedLogValue {
    std::complex<double> value;  // the tracked branch of log L(1, chi)
    int path_steps = 0;          // sigma-grid evaluations used
    int winding = 0;             // multiples of 2*pi added to the principal arg
};

// Evaluates L(1, chi) and its tracked logarithm for characters mod q.
// Values are memoized per conductor; instances are not thread-safe.
class LEvaluator {
public:
    explicit LEvaluator(std::uint64_t q);

    std::uint64_t modulus() const { return q_; }
    const std::vector<chars::DirichletCharacter>& characters() const {
        return characters_;
    }

    // L(1, chi) for non-principal chi:
    //   -(1/f) sum_{a=1}^{f-1} chi*(a) psi(a/f)  x  prod_{p|q, p!|f} (1 - chi*(p)/p)
    // where chi* is the primitive character of conductor f inducing chi.
    std::complex<double> l_one(const chars::DirichletCharacter& chi);

    // The branch of log L(s, chi) that is positive-real-logarithm compatible
    // on sigma > 1, continued along sigma: 2 -> 1. The argument is unwrapped
    // on a dyadic sigma-grid (base step 1/64, adaptive halving when a step
    // turns the argument by more than pi/2, floor 2^-20), anchored at sigma=2
    // against the absolutely convergent prime series.
    BranchedLogValue log_l_one(const chars::DirichletCharacter& chi);

    // L(sigma, chi) for sigma in [1, 2], via Hurwitz-zeta partial sums with
    // Euler-Maclaurin tail correction at the conductor level, times the
    // Euler factors at primes p | q, p !| f. Exposed for verification.
    std::complex<double> l_sigma(const chars::DirichletCharacter& chi, double sigma);

private:
    struct ConductorContext {
        std::shared_ptr<const chars::UnitGroupDecomposition> group;
        std::vector<std::complex<double>> roots;          // e^{2 pi i t / exponent}
        std::vector<double> digamma_by_unit;              // psi(r/f) per unit index
        std::map<double, std::vector<double>> hurwitz;    // sigma -> K_r per unit
    };

    ConductorContext& context(std::uint64_t f);
    const std::vector<double>& hurwitz_row(ConductorContext& ctx, double sigma);
    std::complex<double> primitive_l_sigma(ConductorContext& ctx,
                                           const chars::DirichletCharacter& prim,
                                           double sigma);
    BranchedLogValue primitive_log_l_one(ConductorContext& ctx,
                                         const chars::DirichletCharacter& prim);

    std::uint64_t q_;
    std::vector<chars::DirichletCharacter> characters_;
    std::vector<std::uint64_t> q_prime_factors_;
    std::map<std::uint64_t, ConductorContext> contexts_;
    std::map<std::vector<std::uint64_t>, std::complex<double>> l_one_cache_;
    std::map<std::vector<std::uint64_t>, BranchedLogValue> log_cache_;
};

}  // namespace mertens::sf
