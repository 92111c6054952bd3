#include "mertens/chebotarev.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mertens/characters.hpp"
#include "mertens/numeric.hpp"
#include "mertens/special_functions.hpp"

namespace mertens::cheb {

namespace {

constexpr std::uint64_t kMaxCyclotomicModulus = 1'000'000;
// Prime-power corrections beyond this are below 1/10^6 and are dropped from
// brute-force G estimates.
constexpr std::uint64_t kResidueCorrectionCap = 1'000'000;
// Below this, count cubic roots by exhaustion; above, via gcd(x^p - x, f).
constexpr std::uint64_t kCubicExhaustiveBound = 1'000;

bool is_squarefree(std::uint64_t n) {
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0) return false;
    return true;
}

bool is_fundamental_discriminant(std::int64_t d) {
    if (d == 0 || d == 1) return false;
    const std::uint64_t abs_d =
        d < 0 ? static_cast<std::uint64_t>(-d) : static_cast<std::uint64_t>(d);
    const std::int64_t r4 = ((d % 4) + 4) % 4;
    if (r4 == 1) return is_squarefree(abs_d);
    if (r4 != 0) return false;
    const std::int64_t m = d / 4;
    const std::int64_t m4 = ((m % 4) + 4) % 4;
    return (m4 == 2 || m4 == 3) && is_squarefree(abs_d / 4);
}

// a * b mod p with a fast path while products fit in 64 bits.
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return p < (1ull << 32) ? (a * b) % p : num::mulmod(a, b, p);
}

// a + b mod p for a, b < p, immune to wraparound near 2^64.
inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    const std::uint64_t s = a + b;
    return (s < a || s >= p) ? s - p : s;
}

// --- arithmetic in F_p[x] / (x^3 - x - 1) ---------------------------------

using P3 = std::array<std::uint64_t, 3>;  // c[0] + c[1] x + c[2] x^2

P3 polymul(const P3& a, const P3& b, std::uint64_t p) {
    const std::uint64_t d0 = mul(a[0], b[0], p);
    const std::uint64_t d1 = add(mul(a[0], b[1], p), mul(a[1], b[0], p), p);
    const std::uint64_t d2 = add(
        add(mul(a[0], b[2], p), mul(a[1], b[1], p), p), mul(a[2], b[0], p), p);
    const std::uint64_t d3 = add(mul(a[1], b[2], p), mul(a[2], b[1], p), p);
    const std::uint64_t d4 = mul(a[2], b[2], p);
    // Reduce by x^3 = x + 1 (so x^4 = x^2 + x).
    return {add(d0, d3, p), add(add(d1, d3, p), d4, p), add(d2, d4, p)};
}

// Degree of gcd(u, v) in F_p[x]; polynomials little-endian, u is kept monic
// by construction at each division step.
int poly_gcd_degree(std::vector<std::uint64_t> u, std::vector<std::uint64_t> v,
                    std::uint64_t p) {
    const auto trim = [](std::vector<std::uint64_t>& w) {
        while (!w.empty() && w.back() == 0) w.pop_back();
    };
    trim(u);
    trim(v);
    while (!v.empty()) {
        // u mod v.
        const std::uint64_t inv = num::powmod(v.back(), p - 2, p);
        while (u.size() >= v.size()) {
            const std::uint64_t scale = mul(u.back(), inv, p);
            const std::size_t shift = u.size() - v.size();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::uint64_t sub = mul(scale, v[i], p);
                u[shift + i] = add(u[shift + i], p - sub == p ? 0 : p - sub, p);
            }
            trim(u);
            if (u.empty()) break;
        }
        std::swap(u, v);
    }
    return static_cast<int>(u.size()) - 1;  // -1 for the zero polynomial
}

// Number of roots of x^3 - x - 1 mod p (p prime, p != 23).
unsigned cubic_root_count(std::uint64_t p) {
    if (p < kCubicExhaustiveBound) {
        unsigned roots = 0;
        for (std::uint64_t t = 0; t < p; ++t) {
            const std::uint64_t t3 = mul(mul(t, t, p), t, p);
            if ((t3 + 2 * p - t - 1) % p == 0) ++roots;
        }
        return roots;
    }
    // x^p in F_p[x]/(x^3 - x - 1) by square-and-multiply.
    P3 result = {1, 0, 0};
    P3 base = {0, 1, 0};
    for (std::uint64_t e = p; e != 0; e >>= 1) {
        if (e & 1) result = polymul(result, base, p);
        base = polymul(base, base, p);
    }
    // h = x^p - x; gcd(h, f) collects the linear factors of f.
    const std::vector<std::uint64_t> h = {result[0], add(result[1], p - 1, p),
                                          result[2]};
    const std::vector<std::uint64_t> f = {p - 1, p - 1, 0, 1};
    const int deg = poly_gcd_degree(f, h, p);
    switch (deg) {
        case -1:  // h = 0: f divides x^p - x, i.e. f splits completely
        case 3:
            return 3;
        case 1:
            return 1;
        case 0:
            return 0;
        default:
            throw sf::ConsistencyError(
                "cubic gcd degree 2 is impossible for squarefree reduction");
    }
}

// Conjugacy class id of Frobenius at p, or 0 when p ramifies. p is assumed
// prime (public entry points check; scans feed sieve output).
std::uint64_t classify(const GaloisSetting& setting, std::uint64_t p) {
    switch (setting.kind()) {
        case SettingKind::kCyclotomic: {
            const std::uint64_t q = setting.cyclotomic_modulus();
            if (q % p == 0) return 0;
            return p % q;
        }
        case SettingKind::kQuadratic: {
            const int k = kronecker(setting.quadratic_d(),
                                    static_cast<std::int64_t>(p));
            if (k == 0) return 0;
            return k > 0 ? kSplitClass : kInertClass;
        }
        case SettingKind::kCubicS3: {
            if (p == 23) return 0;
            switch (cubic_root_count(p)) {
                case 3:
                    return kIdentityClass;
                case 1:
                    return kTranspositionClass;
                default:
                    return kThreeCycleClass;
            }
        }
    }
    throw std::logic_error("classify: unhandled setting kind");
}

double loglog(double t) { return std::log(std::log(t)); }

}  // namespace

// --- GaloisSetting ---------------------------------------------------------

GaloisSetting GaloisSetting::cyclotomic(std::uint64_t q) {
    if (q < 3 || q % 4 == 2)
        throw std::invalid_argument(
            "cyclotomic: modulus must be >= 3 and not 2 mod 4");
    if (q > kMaxCyclotomicModulus)
        throw sieve::RangeError("cyclotomic: modulus too large");
    GaloisSetting s;
    s.kind_ = SettingKind::kCyclotomic;
    s.q_ = q;
    s.name_ = "cyclo:" + std::to_string(q);
    s.group_order_ = num::totient(q);
    for (std::uint64_t a = 1; a <= q; ++a)
        if (std::gcd(a, q) == 1)
            s.classes_.push_back(
                {a, 1, std::to_string(a) + " mod " + std::to_string(q)});
    s.ramified_ = num::prime_factors(q);
    // Field discriminant: (-1)^{phi/2} prod_{p^k || q} p^{k phi - phi/(p-1)},
    // when it fits in 64 bits.
    const std::uint64_t phi = s.group_order_;
    double log_abs = 0.0;
    for (std::uint64_t p : s.ramified_) {
        std::uint64_t k = 0, m = q;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        log_abs += static_cast<double>(k * phi - phi / (p - 1)) *
                   std::log(static_cast<double>(p));
    }
    if (log_abs < 62.0 * std::numbers::ln2) {
        std::uint64_t abs_disc = 1;
        for (std::uint64_t p : s.ramified_) {
            std::uint64_t k = 0, m = q;
            while (m % p == 0) {
                m /= p;
                ++k;
            }
            for (std::uint64_t e = 0; e < k * phi - phi / (p - 1); ++e)
                abs_disc *= p;
        }
        s.discriminant_ = (phi / 2) % 2 == 1
                              ? -static_cast<std::int64_t>(abs_disc)
                              : static_cast<std::int64_t>(abs_disc);
    }
    return s;
}

GaloisSetting GaloisSetting::quadratic(std::int64_t d) {
    if (!is_fundamental_discriminant(d))
        throw std::invalid_argument(
            "quadratic: not a fundamental discriminant");
    GaloisSetting s;
    s.kind_ = SettingKind::kQuadratic;
    s.d_ = d;
    s.name_ = "quad:" + std::to_string(d);
    s.group_order_ = 2;
    s.classes_ = {{kSplitClass, 1, "split"}, {kInertClass, 1, "inert"}};
    s.ramified_ = num::prime_factors(
        d < 0 ? static_cast<std::uint64_t>(-d) : static_cast<std::uint64_t>(d));
    s.discriminant_ = d;
    return s;
}

GaloisSetting GaloisSetting::cubic_s3() {
    GaloisSetting s;
    s.kind_ = SettingKind::kCubicS3;
    s.name_ = "cubic-s3";
    s.group_order_ = 6;
    s.classes_ = {{kIdentityClass, 1, "identity"},
                  {kTranspositionClass, 3, "transposition"},
                  {kThreeCycleClass, 2, "3-cycle"}};
    s.ramified_ = {23};
    s.discriminant_ = -23;
    return s;
}

GaloisSetting GaloisSetting::parse(std::string_view text) {
    if (text == "cubic-s3") return cubic_s3();
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const std::string_view head = text.substr(0, colon);
        const std::string_view tail = text.substr(colon + 1);
        if (head == "cyclo") {
            std::uint64_t q = 0;
            const auto [ptr, ec] =
                std::from_chars(tail.data(), tail.data() + tail.size(), q);
            if (ec == std::errc() && ptr == tail.data() + tail.size())
                return cyclotomic(q);
        } else if (head == "quad") {
            std::int64_t d = 0;
            const auto [ptr, ec] =
                std::from_chars(tail.data(), tail.data() + tail.size(), d);
            if (ec == std::errc() && ptr == tail.data() + tail.size())
                return quadratic(d);
        }
    }
    throw std::invalid_argument(
        "unknown Galois setting '" + std::string(text) +
        "' (expected cyclo:q, quad:D, or cubic-s3)");
}

const ConjugacyClass& GaloisSetting::class_by_id(std::uint64_t id) const {
    for (const ConjugacyClass& c : classes_)
        if (c.id == id) return c;
    throw std::invalid_argument("unknown conjugacy class id " +
                                std::to_string(id) + " in " + name_);
}

std::uint64_t GaloisSetting::cyclotomic_modulus() const {
    if (kind_ != SettingKind::kCyclotomic)
        throw std::invalid_argument("not a cyclotomic setting");
    return q_;
}

std::int64_t GaloisSetting::quadratic_d() const {
    if (kind_ != SettingKind::kQuadratic)
        throw std::invalid_argument("not a quadratic setting");
    return d_;
}

// --- Kronecker symbol ------------------------------------------------------

int kronecker(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if (a % 2 == 0 && n % 2 == 0) return 0;
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    int k = 1;
    if (v % 2 == 1) {
        const int r = static_cast<int>(((a % 8) + 8) % 8);
        if (r == 3 || r == 5) k = -k;  // (a/2) = (-1)^{(a^2-1)/8}
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    while (a != 0) {
        v = 0;
        while (a % 2 == 0) {
            a /= 2;
            ++v;
        }
        if (v % 2 == 1) {
            const int r = static_cast<int>(n % 8);
            if (r == 3 || r == 5) k = -k;
        }
        // Reciprocity flip when both odd parts are 3 mod 4 (bit test is
        // two's-complement safe for negative a).
        if ((a & n & 2) != 0) k = -k;
        const std::int64_t r = a < 0 ? -a : a;
        a = n % r;
        n = r;
    }
    return n == 1 ? k : 0;
}

// --- counting --------------------------------------------------------------

FrobeniusOutcome frobenius_class(const GaloisSetting& setting,
                                 std::uint64_t p) {
    if (!num::is_prime_u64(p))
        throw std::invalid_argument("frobenius_class: " + std::to_string(p) +
                                    " is not prime");
    const std::uint64_t id = classify(setting, p);
    return {p, id == 0, id};
}

ClassScan class_scan(const sieve::PrimeTable& table,
                     const std::vector<double>& checkpoints,
                     const GaloisSetting& setting) {
    if (checkpoints.empty())
        throw std::invalid_argument("class_scan: no checkpoints");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw std::invalid_argument("class_scan: checkpoints not ascending");
    if (!(checkpoints.front() >= 2.0))
        throw sieve::RangeError("class_scan: checkpoints must be >= 2");
    if (checkpoints.back() > static_cast<double>(table.limit()))
        throw sieve::RangeError(
            "class_scan: checkpoint exceeds the sieve table limit");

    const std::size_t m = checkpoints.size();
    const auto& classes = setting.classes();
    const std::size_t nc = classes.size();

    // Dense class-id -> slot lookup (ids are residues mod q or 1..3).
    std::uint64_t max_id = 0;
    for (const auto& c : classes) max_id = std::max(max_id, c.id);
    std::vector<std::int32_t> slot_of(max_id + 1, -1);
    for (std::size_t i = 0; i < nc; ++i)
        slot_of[classes[i].id] = static_cast<std::int32_t>(i);

    ClassScan out;
    out.checkpoints = checkpoints;
    out.counts.assign(nc, std::vector<std::uint64_t>(m, 0));
    out.sum_recip.assign(nc, std::vector<double>(m, 0.0));
    out.ramified_sum.assign(m, 0.0);
    out.total_sum.assign(m, 0.0);
    out.residue_correction.assign(nc, 0.0);
    out.correction_cutoff = std::min(
        static_cast<std::uint64_t>(checkpoints.back()), kResidueCorrectionCap);

    std::vector<std::uint64_t> counts(nc, 0);
    std::vector<num::KahanSum> sums(nc);
    std::vector<num::KahanSum> corrections(nc);
    num::KahanSum ramified;
    num::KahanSum total;
    std::size_t k = 0;

    const auto record = [&](std::size_t slot) {
        for (std::size_t c = 0; c < nc; ++c) {
            out.counts[c][slot] = counts[c];
            out.sum_recip[c][slot] = sums[c].value();
        }
        out.ramified_sum[slot] = ramified.value();
        out.total_sum[slot] = total.value();
    };

    table.for_each_prime(
        2, static_cast<std::uint64_t>(std::floor(checkpoints.back())),
        [&](std::uint64_t p) {
            while (k < m && static_cast<double>(p) > checkpoints[k])
                record(k++);
            const double recip = 1.0 / static_cast<double>(p);
            total.add(recip);
            const std::uint64_t id = classify(setting, p);
            if (id == 0) {
                ramified.add(recip);
                return;
            }
            const std::size_t c = static_cast<std::size_t>(slot_of[id]);
            ++counts[c];
            sums[c].add(recip);
            if (p <= out.correction_cutoff)
                corrections[c].add(-std::log1p(-recip) - recip);
        });
    while (k < m) record(k++);
    for (std::size_t c = 0; c < nc; ++c)
        out.residue_correction[c] = corrections[c].value();
    return out;
}

std::uint64_t pi_chebotarev(const sieve::PrimeTable& table, double t,
                            const GaloisSetting& setting,
                            std::uint64_t class_id) {
    const ConjugacyClass& cls = setting.class_by_id(class_id);
    const auto scan = class_scan(table, {t}, setting);
    std::size_t slot = 0;
    while (setting.classes()[slot].id != cls.id) ++slot;
    return scan.counts[slot][0];
}

double chebotarev_error(const sieve::PrimeTable& table, double t,
                        const GaloisSetting& setting, std::uint64_t class_id) {
    const ConjugacyClass& cls = setting.class_by_id(class_id);
    const double weight = static_cast<double>(cls.size) /
                          static_cast<double>(setting.group_order());
    return static_cast<double>(pi_chebotarev(table, t, setting, class_id)) -
           weight * sieve::li(t);
}

double class_sum_residual(const sieve::PrimeTable& table,
                          const GaloisSetting& setting, double x) {
    const auto scan = class_scan(table, {x}, setting);
    num::KahanSum lhs;
    for (std::size_t c = 0; c < setting.classes().size(); ++c)
        lhs.add(scan.sum_recip[c][0]);
    lhs.add(scan.ramified_sum[0]);
    return std::abs(lhs.value() - scan.total_sum[0]);
}

ChebotarevConstants g_bruteforce_estimate(const sieve::PrimeTable& table,
                                          const GaloisSetting& setting,
                                          std::uint64_t class_id, double x) {
    setting.class_by_id(class_id);
    if (!(x >= 20.0))
        throw sieve::RangeError(
            "g_bruteforce_estimate: x must be >= 20 for the drift metric");
    const auto scan = class_scan(table, {x / 10.0, x}, setting);
    return g_estimate_from_scan(scan, setting, class_id);
}

ChebotarevConstants g_estimate_from_scan(const ClassScan& scan,
                                         const GaloisSetting& setting,
                                         std::uint64_t class_id) {
    const ConjugacyClass& cls = setting.class_by_id(class_id);
    const std::size_t m = scan.checkpoints.size();
    if (m < 2)
        throw std::invalid_argument(
            "g_estimate_from_scan: need at least two checkpoints for drift");
    if (scan.sum_recip.size() != setting.classes().size())
        throw std::invalid_argument(
            "g_estimate_from_scan: scan shape does not match the setting");
    std::size_t slot = 0;
    while (setting.classes()[slot].id != cls.id) ++slot;
    const double weight = static_cast<double>(cls.size) /
                          static_cast<double>(setting.group_order());
    const double early =
        scan.sum_recip[slot][m - 2] - weight * loglog(scan.checkpoints[m - 2]);
    const double late =
        scan.sum_recip[slot][m - 1] - weight * loglog(scan.checkpoints[m - 1]);

    ChebotarevConstants out;
    out.setting = setting.name();
    out.class_id = class_id;
    out.class_weight = weight;
    out.g = late;
    out.G = std::exp(-weight * sf::euler_gamma() + late +
                     scan.residue_correction[slot]);
    out.exactness = Exactness::kBruteForceEstimate;
    out.tail_bound = std::abs(late - early);
    out.cutoff = static_cast<std::uint64_t>(scan.checkpoints[m - 1]);
    return out;
}

// --- built-in quadratic field data ------------------------------------------

// Mirror of data/quadratic_fields.txt; regenerate both with
// tools/gen_quadratic_fields.py.
const std::vector<QuadraticFieldData>& quadratic_field_table() {
    static const std::vector<QuadraticFieldData> rows = {
        {-95, 8, 2, 0, 0}, {-91, 2, 2, 0, 0},  {-88, 2, 2, 0, 0},
        {-87, 6, 2, 0, 0}, {-84, 4, 2, 0, 0},  {-83, 3, 2, 0, 0},
        {-79, 5, 2, 0, 0}, {-71, 7, 2, 0, 0},  {-68, 4, 2, 0, 0},
        {-67, 1, 2, 0, 0}, {-59, 3, 2, 0, 0},  {-56, 4, 2, 0, 0},
        {-55, 4, 2, 0, 0}, {-52, 2, 2, 0, 0},  {-51, 2, 2, 0, 0},
        {-47, 5, 2, 0, 0}, {-43, 1, 2, 0, 0},  {-40, 2, 2, 0, 0},
        {-39, 4, 2, 0, 0}, {-35, 2, 2, 0, 0},  {-31, 3, 2, 0, 0},
        {-24, 2, 2, 0, 0}, {-23, 3, 2, 0, 0},  {-20, 2, 2, 0, 0},
        {-19, 1, 2, 0, 0}, {-15, 2, 2, 0, 0},  {-11, 1, 2, 0, 0},
        {-8, 1, 2, 0, 0},  {-7, 1, 2, 0, 0},   {-4, 1, 4, 0, 0},
        {-3, 1, 6, 0, 0},  {5, 1, 2, 1, 1},    {8, 1, 2, 2, 1},
        {12, 1, 2, 4, 1},  {13, 1, 2, 3, 1},   {17, 1, 2, 8, 2},
        {21, 1, 2, 5, 1},  {24, 1, 2, 10, 2},  {28, 1, 2, 16, 3},
        {29, 1, 2, 5, 1},  {33, 1, 2, 46, 8},  {37, 1, 2, 12, 2},
        {40, 2, 2, 6, 1},  {41, 1, 2, 64, 10}, {44, 1, 2, 20, 3},
        {53, 1, 2, 7, 1},  {56, 1, 2, 30, 4},  {57, 1, 2, 302, 40},
        {60, 2, 2, 8, 1},  {61, 1, 2, 39, 5},  {65, 2, 2, 16, 2},
        {69, 1, 2, 25, 3}, {73, 1, 2, 2136, 250},
        {76, 1, 2, 340, 39}, {77, 1, 2, 9, 1}, {85, 2, 2, 9, 1},
        {88, 1, 2, 394, 42}, {89, 1, 2, 1000, 106},
        {92, 1, 2, 48, 5}, {93, 1, 2, 29, 3},  {97, 1, 2, 11208, 1138},
    };
    return rows;
}

std::vector<QuadraticFieldData> parse_quadratic_field_rows(std::istream& in) {
    std::vector<QuadraticFieldData> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        QuadraticFieldData row;
        if (!(fields >> row.d >> row.h >> row.w >> row.t >> row.u))
            throw std::invalid_argument(
                "quadratic field data: malformed line '" + line + "'");
        rows.push_back(row);
    }
    return rows;
}

// --- exact quadratic constants ----------------------------------------------

struct ChebotarevCalculator::Impl {
    std::map<std::uint64_t, sf::LEvaluator> evaluators;
    std::map<std::int64_t, chars::DirichletCharacter> characters;
    std::map<std::int64_t, double> l_values;

    sf::LEvaluator& evaluator(std::uint64_t f) {
        return evaluators.try_emplace(f, f).first->second;
    }
};

ChebotarevCalculator::ChebotarevCalculator(
    std::shared_ptr<const sieve::PrimeTable> table)
    : table_(std::move(table)), impl_(std::make_unique<Impl>()) {
    if (!table_)
        throw std::invalid_argument("ChebotarevCalculator: null prime table");
}

ChebotarevCalculator::~ChebotarevCalculator() = default;

double ChebotarevCalculator::l_one_quadratic(std::int64_t d) {
    const auto cached = impl_->l_values.find(d);
    if (cached != impl_->l_values.end()) return cached->second;
    if (!is_fundamental_discriminant(d))
        throw std::invalid_argument(
            "l_one_quadratic: not a fundamental discriminant");
    const std::uint64_t f =
        d < 0 ? static_cast<std::uint64_t>(-d) : static_cast<std::uint64_t>(d);

    // chi_D is the unique character mod |D| whose values match the Kronecker
    // symbol (D/n) on every unit.
    auto found = impl_->characters.find(d);
    if (found == impl_->characters.end()) {
        for (const auto& chi : chars::characters_mod(f)) {
            if (chi.is_principal() || !chi.is_real()) continue;
            bool match = true;
            for (std::uint64_t n = 1; n < f && match; ++n) {
                if (std::gcd(n, f) != 1) continue;
                const int want = kronecker(d, static_cast<std::int64_t>(n));
                const int got = chi.eval(n).real() > 0.0 ? 1 : -1;
                match = want == got;
            }
            if (match) {
                found = impl_->characters.emplace(d, chi).first;
                break;
            }
        }
        if (found == impl_->characters.end())
            throw sf::ConsistencyError(
                "no character mod |D| matches the Kronecker symbol");
    }

    const std::complex<double> value =
        impl_->evaluator(f).l_one(found->second);
    if (!(value.real() > 0.0) ||
        std::abs(value.imag()) > 1e-10 * (1.0 + std::abs(value.real())))
        throw sf::ConsistencyError("L(1, chi_D) must be real and positive");
    impl_->l_values.emplace(d, value.real());
    return value.real();
}

ChebotarevConstants ChebotarevCalculator::quadratic_exact(
    std::int64_t d, std::uint64_t class_id, std::uint64_t correction_cutoff) {
    const GaloisSetting setting = GaloisSetting::quadratic(d);
    setting.class_by_id(class_id);  // reject unknown ids up front
    if (correction_cutoff < 2 || correction_cutoff > table_->limit())
        throw sieve::RangeError(
            "quadratic_exact: correction cutoff outside the sieve table");

    const double l_value = l_one_quadratic(d);
    double ramified_product = 1.0;
    for (std::uint64_t p : setting.ramified_primes())
        ramified_product *= 1.0 - 1.0 / static_cast<double>(p);
    const double script_sq = ramified_product * (class_id == kSplitClass
                                                     ? l_value
                                                     : 1.0 / l_value);
    const double script_l = std::sqrt(script_sq);

    // Exponent correction: sum over unramified p <= P, nu >= 2 with
    // Frob(p)^nu in the class. Residue correction: same but Frob(p) itself
    // in the class, all nu >= 2 (both have closed forms per prime).
    num::KahanSum exponent_sum;
    num::KahanSum residue_sum;
    table_->for_each_prime(2, correction_cutoff, [&](std::uint64_t p) {
        const std::uint64_t id = classify(setting, p);
        if (id == 0) return;
        const double recip = 1.0 / static_cast<double>(p);
        const double full = -std::log1p(-recip) - recip;  // all nu >= 2
        if (class_id == kSplitClass) {
            if (id == kSplitClass) {
                exponent_sum.add(full);  // Frob = 1: every power lands in C
                residue_sum.add(full);
            } else {
                // Frob of order 2: even powers land in the identity.
                exponent_sum.add(-0.5 * std::log1p(-recip * recip));
            }
        } else {
            if (id == kInertClass) {
                // Odd powers >= 3 stay in the inert class.
                exponent_sum.add(
                    0.5 * (std::log1p(recip) - std::log1p(-recip)) - recip);
                residue_sum.add(full);
            }
        }
    });

    const double weight = 0.5;
    const double g =
        weight * sf::euler_gamma() + std::log(script_l) - exponent_sum.value();
    const double from_script =
        script_l * std::exp(residue_sum.value() - exponent_sum.value());
    const double from_g =
        std::exp(-weight * sf::euler_gamma() + g + residue_sum.value());
    const double tail = 1.0 / static_cast<double>(correction_cutoff);
    if (std::abs(from_script - from_g) > 2.0 * tail + 1e-8)
        throw sf::ConsistencyError(
            "quadratic G: the two defining forms disagree");

    ChebotarevConstants out;
    out.setting = setting.name();
    out.class_id = class_id;
    out.class_weight = weight;
    out.g = g;
    out.G = from_script;
    out.exactness = Exactness::kExact;
    out.tail_bound = tail;
    out.cutoff = correction_cutoff;
    return out;
}

ClassNumberRow ChebotarevCalculator::class_number_crosscheck(std::int64_t d) {
    const auto& rows = quadratic_field_table();
    const auto it =
        std::find_if(rows.begin(), rows.end(),
                     [&](const QuadraticFieldData& r) { return r.d == d; });
    if (it == rows.end())
        throw std::invalid_argument(
            "class_number_crosscheck: discriminant " + std::to_string(d) +
            " is not in the built-in table (|D| <= 100, fundamental)");

    ClassNumberRow row;
    row.field = *it;
    row.l_value = l_one_quadratic(d);
    const double h = static_cast<double>(it->h);
    const double w = static_cast<double>(it->w);
    if (d < 0) {
        row.predicted =
            2.0 * std::numbers::pi * h / (w * std::sqrt(static_cast<double>(-d)));
    } else {
        const double sqrt_d = std::sqrt(static_cast<double>(d));
        row.log_epsilon = std::log(
            (static_cast<double>(it->t) + static_cast<double>(it->u) * sqrt_d) /
            2.0);
        row.predicted = 2.0 * h * row.log_epsilon / sqrt_d;
    }
    row.relative_residual =
        std::abs(row.l_value - row.predicted) / row.predicted;
    return row;
}

}  // namespace mertens::cheb
