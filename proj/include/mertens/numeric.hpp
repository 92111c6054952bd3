#pragma once

// Low-level numeric building blocks shared by every other component:
// compensated summation, adaptive Gauss-Kronrod quadrature, and exact
// modular/integer arithmetic helpers.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace mertens::num {

// ---------------------------------------------------------------------------
// Compensated (Neumaier) summation.
// ---------------------------------------------------------------------------
// Accumulates doubles with an error term so that long sums of small terms
// (e.g. millions of prime reciprocals) keep near-full double precision.
class KahanSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(const KahanSum& other) noexcept {
        add(other.sum_);
        comp_ += other.comp_;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Integer helpers.
// ---------------------------------------------------------------------------
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Deterministic primality for 64-bit inputs (Miller-Rabin with a base set
// proven sufficient for n < 3.3e24).
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// Euler's totient by trial-division factorization; intended for moduli,
// not for bulk use.
inline std::uint64_t totient(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("totient: n must be positive");
    std::uint64_t result = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

// Distinct prime factors, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7,15) quadrature.
// ---------------------------------------------------------------------------
// Splits the interval with the largest error estimate first until the summed
// error estimate falls below tol_abs + tol_rel * |integral|.
struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

namespace detail {

// Nodes/weights of the 15-point Kronrod rule on [-1,1]; the embedded 7-point
// Gauss rule uses the odd-indexed abscissae.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kGK15Nodes[i];
        const double fsum = (i == 7) ? f(center)
                                     : f(center - dx) + f(center + dx);
        kronrod += kGK15Weights[i] * fsum;
        if (i % 2 == 1) gauss += kG7Weights[i / 2] * fsum;
    }
    value = kronrod * half;
    error = std::abs((kronrod - gauss) * half);
}

}  // namespace detail

template <class F>
QuadratureResult integrate(const F& f, double a, double b,
                           double tol_rel = 1e-12, double tol_abs = 0.0,
                           int max_intervals = 4000) {
    if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
    QuadratureResult res;
    if (a == b) return res;

    struct Interval {
        double a, b, value, error;
        bool operator<(const Interval& o) const { return error < o.error; }
    };
    std::priority_queue<Interval> queue;

    double v, e;
    detail::gk15(f, a, b, v, e);
    queue.push({a, b, v, e});
    double total_value = v;
    double total_error = e;
    int count = 1;

    while (count < max_intervals) {
        const double goal =
            std::max(tol_abs, tol_rel * std::max(1.0, std::abs(total_value)));
        if (total_error <= goal) break;
        Interval worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        double v1, e1, v2, e2;
        detail::gk15(f, worst.a, mid, v1, e1);
        detail::gk15(f, mid, worst.b, v2, e2);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        queue.push({worst.a, mid, v1, e1});
        queue.push({mid, worst.b, v2, e2});
        ++count;
    }

    res.value = total_value;
    res.error_estimate = total_error;
    res.intervals = count;
    return res;
}

}  // namespace mertens::num
