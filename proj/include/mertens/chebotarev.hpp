#pragma once

// Chebotarev analogues over K = Q. Three Galois settings are supported:
//
//   cyclo:q   — Q(zeta_q)/Q, group (Z/qZ)*, one singleton class per residue;
//   quad:D    — Q(sqrt(D))/Q for a fundamental discriminant D, classes
//               "split" (identity) and "inert" (the order-2 element),
//               separated by the Kronecker symbol (D/p);
//   cubic-s3  — the Galois closure of x^3 - x - 1 (discriminant -23), group
//               S_3 with classes identity (1), transposition (3), 3-cycle (2),
//               separated by the factorization type of the cubic mod p.
//
// On top of the Frobenius classification sit the counting functions
// pi(t; L/Q, C) and E(t; L/Q, C) = pi - (|C|/|G|) li t, Mertens-type
// constants g(L/Q,C) and G(L/Q,C) (exact for quadratic settings via
// L(1, chi_D), brute-force estimates elsewhere), and the class-number
// cross-check L(1, chi_D) vs 2^{r1}(2 pi)^{r2} h Reg / (w sqrt|D|).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mertens/sieve.hpp"

namespace mertens::cheb {

enum class SettingKind { kCyclotomic, kQuadratic, kCubicS3 };

struct ConjugacyClass {
    std::uint64_t id = 0;
    std::uint64_t size = 1;
    std::string label;
};

// Quadratic class ids (cyclotomic settings use the residue itself).
inline constexpr std::uint64_t kSplitClass = 1;
inline constexpr std::uint64_t kInertClass = 2;
// Cubic class ids.
inline constexpr std::uint64_t kIdentityClass = 1;
inline constexpr std::uint64_t kTranspositionClass = 2;
inline constexpr std::uint64_t kThreeCycleClass = 3;

class GaloisSetting {
public:
    // Q(zeta_q) for q >= 3, q != 2 mod 4 (other q duplicate smaller fields).
    static GaloisSetting cyclotomic(std::uint64_t q);
    // Q(sqrt(D)) for a fundamental discriminant D.
    static GaloisSetting quadratic(std::int64_t d);
    // Galois closure of x^3 - x - 1.
    static GaloisSetting cubic_s3();
    // "cyclo:q" | "quad:D" | "cubic-s3".
    static GaloisSetting parse(std::string_view text);

    SettingKind kind() const { return kind_; }
    const std::string& name() const { return name_; }  // parseable form
    std::uint64_t group_order() const { return group_order_; }
    const std::vector<ConjugacyClass>& classes() const { return classes_; }
    const ConjugacyClass& class_by_id(std::uint64_t id) const;
    const std::vector<std::uint64_t>& ramified_primes() const {
        return ramified_;
    }
    // Field discriminant when representable in 64 bits (always for quadratic
    // and cubic settings; cyclotomic discriminants grow past that quickly).
    std::optional<std::int64_t> discriminant() const { return discriminant_; }

    // Setting parameters; throw for the wrong kind.
    std::uint64_t cyclotomic_modulus() const;
    std::int64_t quadratic_d() const;

private:
    GaloisSetting() = default;

    SettingKind kind_ = SettingKind::kCyclotomic;
    std::string name_;
    std::uint64_t group_order_ = 1;
    std::vector<ConjugacyClass> classes_;
    std::vector<std::uint64_t> ramified_;
    std::optional<std::int64_t> discriminant_;
    std::uint64_t q_ = 0;   // cyclotomic modulus
    std::int64_t d_ = 0;    // quadratic discriminant
};

// Kronecker symbol (a/n), full 2-adic and sign rules.
int kronecker(std::int64_t a, std::int64_t n);

struct FrobeniusOutcome {
    std::uint64_t p = 0;
    bool ramified = false;
    std::uint64_t class_id = 0;  // meaningful only when !ramified
};

// Artin symbol of p in the setting. p must be prime.
FrobeniusOutcome frobenius_class(const GaloisSetting& setting, std::uint64_t p);

// #{p <= t unramified with Frobenius class C} and its deviation from the
// Chebotarev density |C|/|G| li(t).
std::uint64_t pi_chebotarev(const sieve::PrimeTable& table, double t,
                            const GaloisSetting& setting, std::uint64_t class_id);
double chebotarev_error(const sieve::PrimeTable& table, double t,
                        const GaloisSetting& setting, std::uint64_t class_id);

// One classification pass over all primes <= checkpoints.back(), snapshotting
// per-class prime counts and reciprocal sums at each checkpoint. Row order of
// counts/sum_recip matches setting.classes(). residue_correction[c] is
// sum_{p <= correction_cutoff, Frob(p) = C} sum_{nu >= 2} 1/(nu p^nu), cut at
// min(checkpoints.back(), 10^6) (the tail beyond is below 10^-6).
struct ClassScan {
    std::vector<double> checkpoints;
    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::vector<double>> sum_recip;
    std::vector<double> ramified_sum;  // sum of 1/p over ramified p <= x_k
    std::vector<double> total_sum;     // sum of 1/p over all p <= x_k
    std::vector<double> residue_correction;
    std::uint64_t correction_cutoff = 0;
};

ClassScan class_scan(const sieve::PrimeTable& table,
                     const std::vector<double>& checkpoints,
                     const GaloisSetting& setting);

// | sum_C sum_{p<=x, Frob in C} 1/p + sum_{p<=x, p ramified} 1/p
//   - sum_{p<=x} 1/p |: the classes partition the unramified primes, so this
// must vanish to rounding.
double class_sum_residual(const sieve::PrimeTable& table,
                          const GaloisSetting& setting, double x);

enum class Exactness { kExact, kBruteForceEstimate };

struct ChebotarevConstants {
    std::string setting;  // GaloisSetting::name()
    std::uint64_t class_id = 0;
    double class_weight = 0.0;  // |C|/|G|
    double g = 0.0;
    double G = 0.0;
    Exactness exactness = Exactness::kExact;
    // For exact constants: 1/P with P the correction cutoff. For brute-force
    // estimates: the last-decade drift |est(x) - est(x/10)|.
    double tail_bound = 0.0;
    std::uint64_t cutoff = 0;  // correction cutoff P, or the scan limit x
};

// Mertens estimate g ~ sum_{p <= x, Frob in C} 1/p - (|C|/|G|) log log x for
// any setting, tagged with the last-decade drift; the companion G estimate is
// exp(-(|C|/|G|) gamma + g + residue correction). Requires x >= 20.
ChebotarevConstants g_bruteforce_estimate(const sieve::PrimeTable& table,
                                          const GaloisSetting& setting,
                                          std::uint64_t class_id, double x);

// The same estimate assembled from an existing scan (so one scan can serve
// every class): the last checkpoint supplies the estimate, the second-to-last
// the drift. The scan must hold at least two checkpoints for this setting.
ChebotarevConstants g_estimate_from_scan(const ClassScan& scan,
                                         const GaloisSetting& setting,
                                         std::uint64_t class_id);

// One line of the built-in quadratic field table: class number h, root count
// w, and fundamental unit (t + u sqrt(D))/2 (t = u = 0 for D < 0).
struct QuadraticFieldData {
    std::int64_t d = 0;
    std::uint64_t h = 0;
    std::uint64_t w = 0;
    std::uint64_t t = 0;
    std::uint64_t u = 0;
};

// Parse rows in the data/quadratic_fields.txt format ('#' comments, columns
// "D h w t u").
std::vector<QuadraticFieldData> parse_quadratic_field_rows(std::istream& in);

// The compiled-in copy of data/quadratic_fields.txt (|D| <= 100).
const std::vector<QuadraticFieldData>& quadratic_field_table();

struct ClassNumberRow {
    QuadraticFieldData field;
    double log_epsilon = 0.0;  // regulator, 0 for D < 0
    double l_value = 0.0;      // L(1, chi_D)
    double predicted = 0.0;    // residue of zeta_L at 1 from the class data
    double relative_residual = 0.0;
};

class ChebotarevCalculator {
public:
    explicit ChebotarevCalculator(
        std::shared_ptr<const sieve::PrimeTable> table);
    ~ChebotarevCalculator();

    // Exact g/G for a quadratic setting: class-id +-1 exponent on L(1,chi_D)
    // inside L(L/Q,C)^2 = prod_{p|D}(1 - 1/p) L(1,chi_D)^{chi(C)}, Euler
    // gamma/2, and prime-power corrections cut at P (tail 1/P per sum).
    ChebotarevConstants quadratic_exact(std::int64_t d, std::uint64_t class_id,
                                        std::uint64_t correction_cutoff);

    // L(1, chi_D) for the real primitive character of conductor |D|.
    double l_one_quadratic(std::int64_t d);

    // Analytic class number formula against the built-in table: L(1, chi_D)
    // vs 2 pi h / (w sqrt|D|) for D < 0, or 2 h log(eps) / sqrt(D) for D > 0.
    ClassNumberRow class_number_crosscheck(std::int64_t d);

    const std::shared_ptr<const sieve::PrimeTable>& primes() const {
        return table_;
    }

private:
    struct Impl;

    std::shared_ptr<const sieve::PrimeTable> table_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mertens::cheb
