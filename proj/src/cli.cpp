#include "mertens/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mertens/ap_constants.hpp"
#include "mertens/characters.hpp"
#include "mertens/chebotarev.hpp"
#include "mertens/mertens_sums.hpp"
#include "mertens/pliable.hpp"
#include "mertens/report.hpp"
#include "mertens/sieve.hpp"
#include "mertens/special_functions.hpp"

namespace mertens::cli {

namespace {

namespace fs = std::filesystem;
using rep::Cell;

struct RunConfig {
    std::uint64_t sieve_limit = 10'000'000;
    fs::path cache_dir;
    std::string format = "csv";
    bool no_meta = false;
    std::uint64_t correction_cutoff = 10'000'000;
    std::map<std::string, double> tolerances;
};

double tolerance(const RunConfig& config, const std::string& name,
                 double fallback) {
    const auto it = config.tolerances.find(name);
    return it == config.tolerances.end() ? fallback : it->second;
}

double parse_number(const std::string& text) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty() ||
        !std::isfinite(value))
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

// "X" for one point, or "start:end:FACTORx" for a multiplicative grid
// (log log convergence makes additive grids useless).
std::vector<double> parse_x_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        const std::size_t colon = text.find(':', begin);
        parts.push_back(text.substr(begin, colon - begin));
        if (colon == std::string::npos) break;
        begin = colon + 1;
    }
    if (parts.size() == 1) return {parse_number(parts[0])};
    if (parts.size() != 3)
        throw std::invalid_argument("x-grid must be 'X' or 'start:end:10x'");
    if (parts[2].empty() || parts[2].back() != 'x')
        throw std::invalid_argument(
            "x-grid step must be a multiplicative factor like '10x'");
    const double start = parse_number(parts[0]);
    const double end = parse_number(parts[1]);
    const double factor =
        parse_number(parts[2].substr(0, parts[2].size() - 1));
    if (!(factor > 1.0 + 1e-12))
        throw std::invalid_argument("x-grid factor must exceed 1");
    if (!(start <= end * (1.0 + 1e-12)))
        throw std::invalid_argument("x-grid start exceeds its end");
    std::vector<double> grid;
    for (double x = start; x <= end * (1.0 + 1e-9); x *= factor) {
        grid.push_back(x);
        if (grid.size() > 10'000)
            throw std::invalid_argument("x-grid has more than 10000 points");
    }
    return grid;
}

fs::path resolve_cache_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MERTENS_CACHE_DIR"); env && *env)
        return env;
    return fs::temp_directory_path() / "mertens-sieve-cache";
}

std::shared_ptr<const sieve::PrimeTable> load_table(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.cache_dir, ec);  // best effort
    return std::make_shared<const sieve::PrimeTable>(
        sieve::PrimeTable::obtain(config.sieve_limit, config.cache_dir));
}

Cell ucell(std::uint64_t v) {
    return Cell::integer(static_cast<std::int64_t>(v));
}

void add_common_meta(rep::Report& report, const RunConfig& config) {
    report.add_meta("limit", std::to_string(config.sieve_limit));
    report.add_meta("cutoff", std::to_string(config.correction_cutoff));
    for (const auto& [key, value] : config.tolerances)
        report.add_meta("tolerance-" + key, rep::format_real(value));
}

// --- constants ---------------------------------------------------------------

rep::Report cmd_constants(const RunConfig& config, std::uint64_t q,
                          std::optional<std::uint64_t> a) {
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);

    rep::Report report;
    report.schema = "constants/v1";
    report.columns = {"quantity", "q",      "a",      "script_L",
                      "g",        "G",      "g_star", "G_star",
                      "identity_residual",  "cutoff", "tail_bound"};
    add_common_meta(report, config);
    report.add_meta("q", std::to_string(q));
    report.add_meta("a", a ? std::to_string(*a) : "all");

    const auto constants_row = [&](std::uint64_t residue) {
        const ap::APConstants c =
            calc.constants(q, residue, config.correction_cutoff);
        report.add_row({Cell::text("constants"), ucell(q), ucell(residue),
                        Cell::real(c.script_L), Cell::real(c.g),
                        Cell::real(c.G), Cell::real(c.g_star),
                        Cell::real(c.G_star), Cell::none(),
                        ucell(c.correction_cutoff),
                        Cell::real(c.tail_bound)});
    };

    if (a) {
        constants_row(*a);
        return report;
    }
    for (std::uint64_t residue = 1; residue <= q; ++residue)
        if (std::gcd(residue, q) == 1) constants_row(residue);
    if (q >= 2) {
        const double residual =
            calc.sum_identity_residual(q, config.correction_cutoff);
        report.add_row({Cell::text("sum-identity"), ucell(q), Cell::none(),
                        Cell::none(), Cell::none(), Cell::none(), Cell::none(),
                        Cell::none(), Cell::real(residual),
                        ucell(config.correction_cutoff), Cell::none()});
    }
    return report;
}

// --- mertens / product / integral ---------------------------------------------

rep::Report cmd_mertens(const RunConfig& config, std::uint64_t q,
                        std::uint64_t a, const std::string& grid_text,
                        std::optional<double> tail) {
    const std::vector<double> grid = parse_x_grid(grid_text);
    const sieve::APTarget target(q, a);
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);
    const ap::APConstants constants =
        calc.constants(q, a, config.correction_cutoff);

    rep::Report report;
    report.schema = "mertens/v1";
    report.columns = {"x",         "q",        "a",         "sum",
                      "predicted", "residual", "tail_bound"};
    add_common_meta(report, config);
    report.add_meta("quantity",
                    tail ? "identity-closure" : "reciprocal-sum-law");
    report.add_meta("x-grid", grid_text);
    if (tail) report.add_meta("tail-cutoff", rep::format_real(*tail));

    for (double x : grid) {
        const sums::MertensRow row =
            tail ? sums::identity_closure_report(*table, x, *tail, target)
                 : sums::product_report(*table, x, target, constants);
        report.add_row({Cell::real(x), ucell(q), ucell(a),
                        Cell::real(row.sum_recip),
                        Cell::real(row.predicted_sum),
                        Cell::real(row.residual_sum),
                        tail ? Cell::none()
                             : Cell::real(constants.tail_bound)});
    }
    return report;
}

rep::Report cmd_product(const RunConfig& config, std::uint64_t q,
                        std::uint64_t a, const std::string& grid_text) {
    const std::vector<double> grid = parse_x_grid(grid_text);
    const sieve::APTarget target(q, a);
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);
    const ap::APConstants constants =
        calc.constants(q, a, config.correction_cutoff);

    rep::Report report;
    report.schema = "product/v1";
    report.columns = {"x",        "q",     "a",          "product_log",
                      "predicted", "residual", "ratio", "tail_bound"};
    add_common_meta(report, config);
    report.add_meta("quantity", "product-law");
    report.add_meta("x-grid", grid_text);

    for (double x : grid) {
        const sums::MertensRow row =
            sums::product_report(*table, x, target, constants);
        report.add_row({Cell::real(x), ucell(q), ucell(a),
                        Cell::real(row.product_log),
                        Cell::real(row.predicted_product_log),
                        Cell::real(row.residual_product),
                        Cell::real(std::exp(row.residual_product)),
                        Cell::real(constants.tail_bound)});
    }
    return report;
}

rep::Report cmd_integral(const RunConfig& config, std::uint64_t q,
                         std::uint64_t a, double X) {
    const sieve::APTarget target(q, a);
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);
    const ap::APConstants constants =
        calc.constants(q, a, config.correction_cutoff);

    const double value = sums::error_integral(*table, X, target);
    const double predicted =
        constants.g +
        std::log(std::log(2.0)) / static_cast<double>(target.phi());

    rep::Report report;
    report.schema = "integral/v1";
    report.columns = {"q", "a", "X", "integral", "predicted", "residual",
                      "tail_bound"};
    add_common_meta(report, config);
    report.add_meta("quantity", "error-integral");
    report.add_row({ucell(q), ucell(a), Cell::real(X), Cell::real(value),
                    Cell::real(predicted), Cell::real(value - predicted),
                    Cell::real(constants.tail_bound)});
    return report;
}

// --- pliable -------------------------------------------------------------------

rep::Report cmd_pliable(const RunConfig& config, double x, double y,
                        std::uint64_t q, std::uint64_t a) {
    if (!(x >= 1.0) || x >= 9.007199254740992e15)
        throw std::invalid_argument("pliable: x must lie in [1, 2^53)");
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);
    const std::vector<pliable::PliableQuery> queries = {
        pliable::PliableQuery(static_cast<std::uint64_t>(x), y,
                              sieve::APTarget(q, a))};
    const auto rows = pliable::pliable_report(*table, queries, calc,
                                              config.correction_cutoff);

    rep::Report report;
    report.schema = "pliable/v1";
    report.columns = {"x",     "y",         "q",     "a",
                      "exact", "main_term", "ratio", "envelope"};
    add_common_meta(report, config);
    report.add_meta("quantity", "pliable-count");
    for (const auto& row : rows)
        report.add_row({ucell(row.query.x), Cell::real(row.query.y),
                        ucell(row.query.target.q), ucell(row.query.target.a),
                        ucell(row.exact), Cell::real(row.main_term),
                        Cell::real(row.ratio), Cell::real(row.envelope)});
    return report;
}

// --- chebotarev -----------------------------------------------------------------

rep::Report cmd_chebotarev(const RunConfig& config,
                           const std::string& setting_text,
                           std::optional<std::uint64_t> class_filter,
                           double x) {
    const cheb::GaloisSetting setting =
        cheb::GaloisSetting::parse(setting_text);
    if (class_filter) setting.class_by_id(*class_filter);
    if (!(x >= 200.0))
        throw std::invalid_argument(
            "chebotarev: x must be >= 200 (the estimate needs x/100 >= 2)");
    const auto table = load_table(config);
    const auto scan =
        cheb::class_scan(*table, {x / 100.0, x / 10.0, x}, setting);
    const double pi_x = static_cast<double>(table->pi(x));
    const double slope_denominator =
        std::log(std::log(x)) - std::log(std::log(x / 100.0));

    rep::Report report;
    report.schema = "chebotarev/v1";
    report.columns = {"setting", "class_id", "label",  "weight",
                      "kind",    "g",        "G",      "density",
                      "slope",   "tail_bound", "cutoff"};
    add_common_meta(report, config);
    report.add_meta("quantity", "chebotarev-constants");
    report.add_meta("setting", setting.name());
    report.add_meta("x", rep::format_real(x));

    std::unique_ptr<cheb::ChebotarevCalculator> calc;
    if (setting.kind() == cheb::SettingKind::kQuadratic)
        calc = std::make_unique<cheb::ChebotarevCalculator>(table);

    for (std::size_t slot = 0; slot < setting.classes().size(); ++slot) {
        const cheb::ConjugacyClass& cls = setting.classes()[slot];
        if (class_filter && cls.id != *class_filter) continue;
        if (calc) {
            const auto exact = calc->quadratic_exact(
                setting.quadratic_d(), cls.id, config.correction_cutoff);
            report.add_row({Cell::text(setting.name()), ucell(cls.id),
                            Cell::text(cls.label),
                            Cell::real(exact.class_weight),
                            Cell::text("exact"), Cell::real(exact.g),
                            Cell::real(exact.G), Cell::none(), Cell::none(),
                            Cell::real(exact.tail_bound),
                            ucell(exact.cutoff)});
        }
        const auto estimate = cheb::g_estimate_from_scan(scan, setting, cls.id);
        const double density = static_cast<double>(scan.counts[slot][2]) / pi_x;
        const double slope =
            (scan.sum_recip[slot][2] - scan.sum_recip[slot][0]) /
            slope_denominator;
        report.add_row({Cell::text(setting.name()), ucell(cls.id),
                        Cell::text(cls.label),
                        Cell::real(estimate.class_weight),
                        Cell::text("estimate"), Cell::real(estimate.g),
                        Cell::real(estimate.G), Cell::real(density),
                        Cell::real(slope), Cell::real(estimate.tail_bound),
                        ucell(estimate.cutoff)});
    }
    return report;
}

// --- selftest -------------------------------------------------------------------

// Largest orthogonality defect of the character-selector relation
// sum_chi conj(chi(m)) chi(n) = phi(q) [m unit, m = n] over all m, n mod q.
double character_orthogonality_defect(std::uint64_t q) {
    const auto characters = chars::characters_mod(q);
    const double phi = static_cast<double>(characters.size());
    double worst = 0.0;
    for (std::uint64_t m = 0; m < q; ++m) {
        const bool unit = std::gcd(m == 0 ? q : m, q) == 1;
        for (std::uint64_t n = 0; n < q; ++n) {
            std::complex<double> sum = 0.0;
            for (const auto& chi : characters)
                sum += std::conj(chi.eval(m)) * chi.eval(n);
            const double expected = unit && (m % q == n % q) ? phi : 0.0;
            worst = std::max(worst, std::abs(sum - expected));
        }
    }
    return worst;
}

// Largest defect of the residue-sum relation
// sum_{1 <= m <= q} conj(chi(m)) = phi(q) [chi principal] over all chi.
double residue_orthogonality_defect(std::uint64_t q) {
    const auto characters = chars::characters_mod(q);
    const double phi = static_cast<double>(characters.size());
    double worst = 0.0;
    for (const auto& chi : characters) {
        std::complex<double> sum = 0.0;
        for (std::uint64_t m = 1; m <= q; ++m) sum += std::conj(chi.eval(m));
        const double expected = chi.is_principal() ? phi : 0.0;
        worst = std::max(worst, std::abs(sum - expected));
    }
    return worst;
}

rep::Report cmd_selftest(const RunConfig& config) {
    const auto table = load_table(config);
    ap::ConstantsCalculator calc(table);
    const double limit = static_cast<double>(config.sieve_limit);
    const double probe = std::min(limit, 1e6);

    rep::Report report;
    report.schema = "selftest/v1";
    report.columns = {"check", "scale", "residual", "tolerance", "status"};
    add_common_meta(report, config);
    report.add_meta("quantity", "selftest");

    bool all_pass = true;
    const auto check = [&](const std::string& name, double scale,
                           double residual, double fallback_tolerance) {
        const double tol = tolerance(config, name, fallback_tolerance);
        const bool pass = residual <= tol;
        all_pass = all_pass && pass;
        report.add_row({Cell::text(name), Cell::real(scale),
                        Cell::real(residual), Cell::real(tol),
                        Cell::text(pass ? "pass" : "fail")});
    };

    double char_defect = 0.0, residue_defect = 0.0;
    for (std::uint64_t q = 1; q <= 30; ++q) {
        char_defect = std::max(char_defect, character_orthogonality_defect(q));
        residue_defect =
            std::max(residue_defect, residue_orthogonality_defect(q));
    }
    check("orthogonality-characters", 30, char_defect, 1e-12);
    check("orthogonality-residues", 30, residue_defect, 1e-12);

    const auto n = static_cast<std::uint64_t>(probe);
    check("gamma-limit", probe,
          std::abs(sf::harmonic_gamma_estimate(n) - sf::euler_gamma()),
          1e-7 + 0.5 / probe);

    const sieve::APTarget target(3, 1);
    check("abel-identity", probe,
          sums::abel_identity_residual(*table, probe, target), 1e-8);

    const sums::MertensRow closure =
        sums::identity_closure_report(*table, probe / 100.0, probe, target);
    check("identity-closure", probe / 100.0, std::abs(closure.residual_sum),
          1e-10);

    check("sum-identity", 12,
          calc.sum_identity_residual(12, config.correction_cutoff), 1e-6);

    check("class-partition", std::min(probe, 1e5),
          cheb::class_sum_residual(*table, cheb::GaloisSetting::cubic_s3(),
                                   std::min(probe, 1e5)),
          1e-10);

    check("quadrature-tail", 1e-3,
          sf::tail_quadrature_residual(std::log(2.0), 1e-3), 1e-2);

    report.add_meta("result", all_pass ? "pass" : "fail");
    return report;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{
        "Mertens-type constants and error terms for primes in arithmetic "
        "progressions, pliable-integer counts, and Frobenius-class prime "
        "statistics"};
    app.fallthrough();
    app.require_subcommand(1);

    double limit = 1e7;
    app.add_option("--limit", limit,
                   "sieve limit (primes up to here are available)");
    std::string cache_flag;
    app.add_option("--cache-dir", cache_flag,
                   "sieve cache directory (default: $MERTENS_CACHE_DIR or "
                   "the system temp dir)");
    std::string format = "csv";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    bool no_meta = false;
    app.add_flag("--no-meta", no_meta,
                 "suppress comment/metadata lines (byte-stable output)");
    double cutoff = 0.0;
    app.add_option("--cutoff,-P", cutoff,
                   "prime-power correction cutoff (default min(1e7, limit))");
    std::vector<std::string> tolerance_flags;
    app.add_option("--tol", tolerance_flags,
                   "tolerance override name=value (repeatable)");

    auto* c_constants =
        app.add_subcommand("constants", "script_L, g, G, g*, G* for (q, a)");
    std::uint64_t q = 1, a = 0;
    c_constants->add_option("--q", q, "modulus")->required();
    bool a_given = false;
    c_constants->add_option("--a", a, "residue (default: every coprime one)");

    auto* c_mertens = app.add_subcommand(
        "mertens", "reciprocal-sum law (or exact closure) over an x-grid");
    std::uint64_t mq = 0, ma = 0;
    std::string m_grid = "1e4:1e7:10x";
    double m_tail = 0.0;
    bool m_tail_given = false;
    c_mertens->add_option("--q", mq, "modulus")->required();
    c_mertens->add_option("--a", ma, "residue")->required();
    c_mertens->add_option("--x-grid", m_grid, "'X' or 'start:end:10x'");
    c_mertens->add_option("--tail", m_tail,
                          "close the identity with data up to this cutoff");

    auto* c_product = app.add_subcommand(
        "product", "Mertens product law over an x-grid");
    std::uint64_t pq = 0, pa = 0;
    std::string p_grid = "1e4:1e7:10x";
    c_product->add_option("--q", pq, "modulus")->required();
    c_product->add_option("--a", pa, "residue")->required();
    c_product->add_option("--x-grid", p_grid, "'X' or 'start:end:10x'");

    auto* c_integral =
        app.add_subcommand("integral", "error-term integral against g");
    std::uint64_t iq = 0, ia = 1;
    double i_x = 1e7;
    c_integral->add_option("--q", iq, "modulus")->required();
    c_integral->add_option("--a", ia, "residue (default 1)");
    c_integral->add_option("--X", i_x, "upper integration limit");

    auto* c_pliable = app.add_subcommand(
        "pliable", "count integers with every prime factor > y and = a mod q");
    std::uint64_t plq = 0, pla = 0;
    double plx = 0.0, ply = 1.0;
    c_pliable->add_option("--x", plx, "count up to here")->required();
    c_pliable->add_option("--y", ply, "prime-factor floor")->required();
    c_pliable->add_option("--q", plq, "modulus")->required();
    c_pliable->add_option("--a", pla, "residue")->required();

    auto* c_chebotarev = app.add_subcommand(
        "chebotarev", "per-class prime statistics for a Galois setting");
    std::string setting_text;
    std::uint64_t class_id = 0;
    bool class_given = false;
    double ch_x = 1e6;
    c_chebotarev
        ->add_option("setting", setting_text,
                     "'cyclo:q', 'quad:D', or 'cubic-s3'")
        ->required();
    c_chebotarev->add_option("--class", class_id, "restrict to one class id");
    c_chebotarev->add_option("--x", ch_x, "scan limit");

    auto* c_selftest = app.add_subcommand(
        "selftest", "fast internal identity checks (exit 4 on failure)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    a_given = c_constants->count("--a") > 0;
    m_tail_given = c_mertens->count("--tail") > 0;
    class_given = c_chebotarev->count("--class") > 0;

    try {
        RunConfig config;
        if (!(limit >= 1e3) || limit > static_cast<double>(1ull << 40))
            throw std::invalid_argument(
                "--limit must lie in [1e3, 2^40]");
        config.sieve_limit = static_cast<std::uint64_t>(limit);
        if (app.count("--cutoff") == 0)
            cutoff = std::min(1e7, limit);
        if (!(cutoff >= 2.0) || cutoff > limit)
            throw std::invalid_argument(
                "--cutoff must lie in [2, --limit]");
        config.correction_cutoff = static_cast<std::uint64_t>(cutoff);
        config.cache_dir = resolve_cache_dir(cache_flag);
        config.format = format;
        config.no_meta = no_meta;
        for (const std::string& flag : tolerance_flags) {
            const std::size_t eq = flag.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument(
                    "--tol expects name=value, got '" + flag + "'");
            config.tolerances[flag.substr(0, eq)] =
                parse_number(flag.substr(eq + 1));
        }

        rep::Report report;
        if (app.got_subcommand(c_constants)) {
            report = cmd_constants(
                config, q,
                a_given ? std::optional<std::uint64_t>(a) : std::nullopt);
        } else if (app.got_subcommand(c_mertens)) {
            report = cmd_mertens(
                config, mq, ma, m_grid,
                m_tail_given ? std::optional<double>(m_tail) : std::nullopt);
        } else if (app.got_subcommand(c_product)) {
            report = cmd_product(config, pq, pa, p_grid);
        } else if (app.got_subcommand(c_integral)) {
            report = cmd_integral(config, iq, ia, i_x);
        } else if (app.got_subcommand(c_pliable)) {
            report = cmd_pliable(config, plx, ply, plq, pla);
        } else if (app.got_subcommand(c_chebotarev)) {
            report = cmd_chebotarev(config, setting_text,
                                    class_given
                                        ? std::optional<std::uint64_t>(class_id)
                                        : std::nullopt,
                                    ch_x);
        } else {
            report = cmd_selftest(config);
        }

        rep::WriteOptions options;
        options.with_meta = !config.no_meta;
        if (config.format == "json")
            rep::write_json(out, report, options);
        else
            rep::write_csv(out, report, options);

        if (app.got_subcommand(c_selftest)) {
            for (const auto& [key, value] : report.meta)
                if (key == "result" && value == "fail") {
                    err << "consistency error: self-test checks failed\n";
                    return 4;
                }
        }
        return 0;
    } catch (const sf::ConsistencyError& e) {
        err << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const sieve::RangeError& e) {
        err << "range error: " << e.what()
            << " (raise --limit to widen the sieve)\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        err << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace mertens::cli
