#include "mertens/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mertens/numeric.hpp"

namespace mertens::sf {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Primes up to 2000 for the sigma=2 anchor series (trial division; built once).
const std::vector<std::uint64_t>& anchor_primes() {
    static const std::vector<std::uint64_t> primes = [] {
        std::vector<std::uint64_t> out;
        for (std::uint64_t n = 2; n <= 2000; ++n) {
            bool prime = true;
            for (std::uint64_t d = 2; d * d <= n; ++d)
                if (n % d == 0) { prime = false; break; }
            if (prime) out.push_back(n);
        }
        return out;
    }();
    return primes;
}

std::complex<double> principal_log(std::complex<double> z) {
    return {std::log(std::abs(z)), std::arg(z)};
}

}  // namespace

double euler_gamma() { return kEulerGamma; }

double harmonic_gamma_estimate(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("harmonic_gamma_estimate: n >= 1");
    num::KahanSum sum;
    // Ascending k keeps each term's rounding small relative to the partial sum.
    for (std::uint64_t k = 1; k <= n; ++k) sum.add(1.0 / static_cast<double>(k));
    return sum.value() - std::log(static_cast<double>(n));
}

double digamma(std::int64_t numr, std::int64_t den) {
    if (den <= 0 || numr <= 0 || numr > den)
        throw std::invalid_argument("digamma: argument must be rational in (0, 1]");
    double x = static_cast<double>(numr) / static_cast<double>(den);
    // psi(x) = psi(x + m) - sum_{k=0}^{m-1} 1/(x + k), shifting to x + m >= 10.
    double shift = 0.0;
    for (int k = 0; k < 10; ++k) {
        shift += 1.0 / x;
        x += 1.0;
    }
    // Asymptotic series psi(z) = log z - 1/(2z) - sum_j B_{2j} / (2j z^{2j}).
    const double z2 = 1.0 / (x * x);
    double series = 0.0;
    static constexpr double kCoeff[7] = {
        1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
        1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0};
    double power = z2;
    for (double c : kCoeff) {
        series += c * power;
        power *= z2;
    }
    return std::log(x) - 0.5 / x - series - shift;
}

double gamma_fn(double s) {
    if (!(s > 0.0) || s > 1.0)
        throw std::invalid_argument("gamma_fn: s must lie in (0, 1]");
    return std::tgamma(s);
}

double tail_quadrature_residual(double eta, double delta) {
    if (!(eta > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("tail_quadrature_residual: eta, delta must be positive");
    // Substituting u = e^v turns u^{-1} e^{-delta u} du into e^{-delta e^v} dv,
    // a smooth bounded integrand; the tail beyond u = 50/delta is < e^{-50}.
    const double lo = std::log(eta);
    const double hi = std::log(50.0 / delta);
    const auto integral = num::integrate(
        [delta](double v) { return std::exp(-delta * std::exp(v)); }, lo, hi, 1e-13);
    const double predicted = std::log(1.0 / delta) - std::log(eta) - kEulerGamma;
    return std::abs(integral.value - predicted);
}

// ---------------------------------------------------------------------------
// LEvaluator
// ---------------------------------------------------------------------------

LEvaluator::LEvaluator(std::uint64_t q)
    : q_(q),
      characters_(chars::characters_mod(q)),
      q_prime_factors_(num::prime_factors(q)) {}

LEvaluator::ConductorContext& LEvaluator::context(std::uint64_t f) {
    auto it = contexts_.find(f);
    if (it != contexts_.end()) return it->second;
    ConductorContext ctx;
    ctx.group = chars::decompose_units(f);
    ctx.roots = chars::root_table(ctx.group->exponent);
    ctx.digamma_by_unit.reserve(ctx.group->residues.size());
    for (std::uint64_t r : ctx.group->residues)
        ctx.digamma_by_unit.push_back(
            digamma(static_cast<std::int64_t>(r), static_cast<std::int64_t>(f)));
    return contexts_.emplace(f, std::move(ctx)).first->second;
}

// K_r(sigma) = zeta(sigma, r/f) - 1/(sigma - 1), assembled so that the pole
// part is finite at sigma = 1; the dropped constant 1/(sigma-1) cancels in
// sum_r chi(r) K_r because sum_r chi(r) = 0 for non-principal chi.
const std::vector<double>& LEvaluator::hurwitz_row(ConductorContext& ctx,
                                                   double sigma) {
    auto it = ctx.hurwitz.find(sigma);
    if (it != ctx.hurwitz.end()) return it->second;

    const std::uint64_t f = ctx.group->q;
    // Cut chosen so the whole-character sum has about 1e4 direct terms.
    const std::uint64_t M = std::max<std::uint64_t>(24, (10000 + f - 1) / f);
    const double Md = static_cast<double>(M);

    // Rising-factorial coefficients B_{2j}/(2j)! * sigma (sigma+1) ... (sigma+2j-2).
    static constexpr double kB[4] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                     -1.0 / 1209600.0};
    double rising[4];
    {
        double prod = sigma;
        rising[0] = kB[0] * prod;
        for (int j = 1; j < 4; ++j) {
            prod *= (sigma + 2 * j - 1) * (sigma + 2 * j);
            rising[j] = kB[j] * prod;
        }
    }

    std::vector<double> row;
    row.reserve(ctx.group->residues.size());
    for (std::uint64_t r : ctx.group->residues) {
        const double x = static_cast<double>(r) / static_cast<double>(f);
        num::KahanSum direct;
        for (std::uint64_t n = 0; n < M; ++n)
            direct.add(std::pow(static_cast<double>(n) + x, -sigma));
        const double mx = Md + x;
        const double lmx = std::log(mx);
        const double pole = (sigma == 1.0)
                                ? -lmx
                                : std::expm1((1.0 - sigma) * lmx) / (sigma - 1.0);
        const double mxs = std::exp(-sigma * lmx);  // (M+x)^-sigma
        double tail = 0.5 * mxs;
        double power = mxs / mx;  // (M+x)^{-sigma-1}
        for (int j = 0; j < 4; ++j) {
            tail += rising[j] * power;
            power /= mx * mx;
        }
        row.push_back(direct.value() + pole + tail);
    }
    return ctx.hurwitz.emplace(sigma, std::move(row)).first->second;
}

std::complex<double> LEvaluator::primitive_l_sigma(
    ConductorContext& ctx, const chars::DirichletCharacter& prim, double sigma) {
    if (!(sigma >= 1.0 && sigma <= 2.0))
        throw std::invalid_argument("l_sigma: sigma must lie in [1, 2]");
    const auto& K = hurwitz_row(ctx, sigma);
    const std::size_t units = ctx.group->residues.size();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < units; ++i)
        sum += ctx.roots[prim.angle_index(i)] * K[i];
    const double scale =
        std::exp(-sigma * std::log(static_cast<double>(ctx.group->q)));
    return scale * sum;
}

std::complex<double> LEvaluator::l_sigma(const chars::DirichletCharacter& chi,
                                         double sigma) {
    const auto pd = chars::conductor_and_primitive(chi);
    if (pd.conductor == 1)
        throw std::invalid_argument("l_sigma: principal character has a pole");
    auto& ctx = context(pd.conductor);
    std::complex<double> value = primitive_l_sigma(ctx, pd.character, sigma);
    for (std::uint64_t p : q_prime_factors_) {
        if (pd.conductor % p == 0) continue;
        value *= 1.0 - pd.character.eval(p) *
                           std::exp(-sigma * std::log(static_cast<double>(p)));
    }
    return value;
}

std::complex<double> LEvaluator::l_one(const chars::DirichletCharacter& chi) {
    if (chi.is_principal())
        throw std::invalid_argument("l_one: principal character has a pole at s=1");
    if (auto it = l_one_cache_.find(chi.exponents()); it != l_one_cache_.end())
        return it->second;

    const auto pd = chars::conductor_and_primitive(chi);
    auto& ctx = context(pd.conductor);
    const std::size_t units = ctx.group->residues.size();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < units; ++i)
        sum += ctx.roots[pd.character.angle_index(i)] * ctx.digamma_by_unit[i];
    std::complex<double> value = -sum / static_cast<double>(pd.conductor);
    for (std::uint64_t p : q_prime_factors_) {
        if (pd.conductor % p == 0) continue;
        value *= 1.0 - pd.character.eval(p) / static_cast<double>(p);
    }
    l_one_cache_.emplace(chi.exponents(), value);
    return value;
}

BranchedLogValue LEvaluator::primitive_log_l_one(
    ConductorContext& ctx, const chars::DirichletCharacter& prim) {
    // L(1, chi*) at full accuracy from the digamma formula (conductor level:
    // no Euler factors).
    const std::size_t units = ctx.group->residues.size();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < units; ++i)
        sum += ctx.roots[prim.angle_index(i)] * ctx.digamma_by_unit[i];
    const std::complex<double> l1 = -sum / static_cast<double>(ctx.group->q);

    BranchedLogValue out;
    if (prim.is_real()) {
        // Real non-principal characters keep a constant sign on sigma >= 1
        // (Euler product is zero-free on sigma > 1, L(1) != 0), and tend to 1
        // as sigma -> infinity, so L stays positive: the branch is real.
        if (std::abs(l1.imag()) > 1e-10 * (1.0 + std::abs(l1.real())))
            throw ConsistencyError("real character produced non-real L(1)");
        if (!(l1.real() > 0.0))
            throw ConsistencyError("real character with non-positive L(1)");
        out.value = {std::log(l1.real()), 0.0};
        return out;
    }

    // Anchor at sigma = 2 via the absolutely convergent prime series
    // log L(2, chi) = sum_p sum_nu chi(p^nu) / (nu p^{2 nu});  tail < 1e-4.
    std::complex<double> anchor = 0.0;
    const std::uint64_t f = ctx.group->q;
    for (std::uint64_t p : anchor_primes()) {
        if (prim.eval(p % f) == std::complex<double>{0.0, 0.0}) continue;
        const double p2 = static_cast<double>(p) * static_cast<double>(p);
        double pw = 1.0;
        std::uint64_t pnu = 1;  // p^nu reduced mod f
        for (int nu = 1;; ++nu) {
            pw /= p2;
            if (pw < 1e-19) break;
            pnu = pnu * (p % f) % f;
            anchor += prim.eval(pnu) * (pw / nu);
        }
    }

    // March sigma: 2 -> 1 on the dyadic grid, unwrapping the argument.
    double theta = anchor.imag();
    int steps = 0;
    std::complex<double> prev = primitive_l_sigma(ctx, prim, 2.0);
    ++steps;
    if (std::abs(std::arg(prev * std::exp(-anchor))) > 0.05 ||
        std::abs(prev - std::exp(anchor)) > 1e-3 * std::abs(prev))
        throw ConsistencyError("sigma=2 anchor mismatch between prime series "
                               "and Hurwitz evaluation");

    const double kBaseStep = 1.0 / 64.0;
    const double kFloor = std::pow(2.0, -20.0);

    // Advance from sigma_from (value prev) to sigma_to, bisecting until each
    // accepted step turns the argument by at most pi/2.
    auto advance = [&](auto&& self, double sigma_from, double sigma_to,
                       std::complex<double> from_value) -> std::complex<double> {
        const std::complex<double> to_value =
            primitive_l_sigma(ctx, prim, sigma_to);
        ++steps;
        const double turn = std::arg(to_value * std::conj(from_value));
        if (std::abs(turn) <= std::numbers::pi / 2.0) {
            theta += turn;
            return to_value;
        }
        if (sigma_from - sigma_to < kFloor)
            throw ConsistencyError("branch tracking stalled: argument jump "
                                   "does not settle under refinement");
        const double mid = 0.5 * (sigma_from + sigma_to);
        const std::complex<double> mid_value = self(self, sigma_from, mid, from_value);
        return self(self, mid, sigma_to, mid_value);
    };

    for (int j = 1; j <= 64; ++j) {
        const double target = 2.0 - kBaseStep * j;
        prev = advance(advance, 2.0 - kBaseStep * (j - 1), target, prev);
    }

    // Close the path onto the accurate endpoint value.
    const double closing = std::arg(l1 * std::conj(prev));
    if (std::abs(closing) > 1e-3)
        throw ConsistencyError("endpoint mismatch between path tracking and "
                               "the digamma evaluation of L(1, chi)");
    theta += closing;

    const double principal = std::arg(l1);
    const int winding = static_cast<int>(
        std::lround((theta - principal) / (2.0 * std::numbers::pi)));
    out.value = principal_log(l1) +
                std::complex<double>{0.0, 2.0 * std::numbers::pi * winding};
    out.path_steps = steps;
    out.winding = winding;
    return out;
}

BranchedLogValue LEvaluator::log_l_one(const chars::DirichletCharacter& chi) {
    if (chi.is_principal())
        throw std::invalid_argument("log_l_one: principal character has a pole");
    if (auto it = log_cache_.find(chi.exponents()); it != log_cache_.end())
        return it->second;

    const auto pd = chars::conductor_and_primitive(chi);
    auto& ctx = context(pd.conductor);
    BranchedLogValue result = primitive_log_l_one(ctx, pd.character);

    // Euler factors at p | q, p !| f stay in |z - 1| <= 1/2 for sigma >= 1,
    // so their principal logarithms are the continuous continuation.
    for (std::uint64_t p : q_prime_factors_) {
        if (pd.conductor % p == 0) continue;
        result.value += principal_log(
            1.0 - pd.character.eval(p) / static_cast<double>(p));
    }
    // Real characters have an exactly real branch; shed evaluation roundoff.
    if (chi.is_real()) result.value.imag(0.0);
    log_cache_.emplace(chi.exponents(), result);
    return result;
}

}  // namespace mertens::sf
