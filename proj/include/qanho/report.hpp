#ifndef QANHO_REPORT_HPP
#define QANHO_REPORT_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qanho/basis.hpp"
#include "qanho/precision.hpp"

namespace qanho {

/// The published 1184-digit ground-state value, embedded as the primary
/// acceptance oracle (digit characters only, no decimal point).
inline const std::string& reference_eps0_digits() {
    static const std::string d =
        "1060362090484182899647046016692663545515208728528977933216245241695943563044344421"
        "126896299134671703"
        "5105462443585825255808798082102931470131768363738249357892262460047081754469601416"
        "374884172822569059"
        "3575779088806178879026360154939569027519614890094293487358440944269489790121397146"
        "429095192335453382"
        "8347033505757615112025703988852372024022184110308657373109139891545365841031116794"
        "058335486000922744"
        "0069631126702388622971429699610592155832266713769355086736100008318300275179262335"
        "739139061361807764"
        "9859696181499412792809272840707956106044072294680994913627572927387279136890279842"
        "472226171694448895"
        "4751370438068405439187787729532342458743725431783231906038106874160440343745301468"
        "472781391861294047"
        "0431034013510716071103530089298232754276615189869505650471602527560895262621910256"
        "882009644102878156"
        "4005270529293240507638265028259112477362538471854714402572285438485297450458570978"
        "840249066999570476"
        "8445877091762029124375273254907116433440230294730692398190895685374535988446016002"
        "313291933059395869"
        "3049166442816339461633242870042614612377430099522342042085977356901535654168503089"
        "418513487957341065"
        "854797194675964667966134676885864379526545195605682867159583388847434670120424207149";
    return d;
}

constexpr long kReferenceDigitCount = 1184;

/// Same value with its decimal point.
inline const std::string& reference_eps0() {
    static const std::string s = "1." + reference_eps0_digits().substr(1);
    return s;
}

/// The 130-digit value printed alongside the 500-state truncation run. Its
/// trailing digits exceed that truncation's accuracy; it agrees with the
/// full constant on the first 121 digits.
inline const std::string& hill_reference_eps0() {
    static const std::string s =
        "1.06036209048418289964704601669266354551520872852897793321624524169594356304434442"
        "1126896299134671703510546244358582525580982763829";
    return s;
}

namespace detail {

inline std::string digit_chars_of(const std::string& s, bool* negative) {
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    std::string out;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_point)
                throw std::invalid_argument("malformed decimal string: '" + s + "'");
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9')
            throw std::invalid_argument("malformed decimal string: '" + s + "'");
        out += c;
    }
    if (out.empty()) throw std::invalid_argument("malformed decimal string: '" + s + "'");
    if (negative) *negative = neg;
    return out;
}

}  // namespace detail

/// Count of leading significant digits (decimal point ignored) on which the
/// two strings agree. The comparison is textual; magnitudes are not aligned.
inline long compare_digits(const std::string& computed, const std::string& reference) {
    bool neg_a = false, neg_b = false;
    std::string a = detail::digit_chars_of(computed, &neg_a);
    std::string b = detail::digit_chars_of(reference, &neg_b);
    if (neg_a != neg_b) return 0;
    auto strip = [](std::string& s) {
        size_t nz = s.find_first_not_of('0');
        s = nz == std::string::npos ? std::string("0") : s.substr(nz);
    };
    strip(a);
    strip(b);
    long n = 0;
    size_t limit = std::min(a.size(), b.size());
    while (static_cast<size_t>(n) < limit && a[static_cast<size_t>(n)] == b[static_cast<size_t>(n)]) ++n;
    return n;
}

struct DigitStats {
    std::array<long, 10> counts{};
    long total = 0;
    double chi_square = 0.0;  // vs the uniform distribution over 10 digits
};

inline DigitStats digit_frequencies(const std::string& digit_string) {
    std::string d = detail::digit_chars_of(digit_string, nullptr);
    DigitStats st;
    for (char c : d) ++st.counts[static_cast<size_t>(c - '0')];
    st.total = static_cast<long>(d.size());
    double expected = static_cast<double>(st.total) / 10.0;
    for (long c : st.counts) {
        double dlt = static_cast<double>(c) - expected;
        st.chi_square += dlt * dlt / expected;
    }
    return st;
}

struct RunReport {
    std::string method;  // "series" or "hill"
    long n = 0;          // series truncation order
    std::string xi;      // series evaluation point
    long states = 0;     // hill basis states
    long eigenvalues = 0;
    long working_digits = 0;
    std::string lo;
    std::string hi;
    std::string certified_digits;
    long certified_count = 0;
    long reference_match = 0;
    std::vector<double> timings;  // seconds per stage; excluded from determinism
    std::vector<std::pair<std::string, std::string>> extra_brackets;
};

enum class ReportFormat { json, text };

namespace detail {

inline std::string wrap_digits(const std::string& s, long per_line) {
    std::string out;
    long in_line = 0;
    for (char c : s) {
        out += c;
        if (c >= '0' && c <= '9' && ++in_line == per_line) {
            out += '\n';
            in_line = 0;
        }
    }
    if (!out.empty() && out.back() != '\n') out += '\n';
    return out;
}

}  // namespace detail

inline std::string emit_report(const RunReport& r, ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::json j;
        j["method"] = r.method;
        if (r.method == "series") {
            j["n"] = r.n;
            j["xi"] = r.xi;
        } else {
            j["states"] = r.states;
            j["eigenvalues"] = r.eigenvalues;
        }
        j["working_digits"] = r.working_digits;
        j["lo"] = r.lo;
        j["hi"] = r.hi;
        j["certified_digits"] = r.certified_digits;
        j["certified_count"] = r.certified_count;
        j["reference_match"] = r.reference_match;
        j["timings"] = r.timings;
        if (!r.extra_brackets.empty()) {
            nlohmann::json xb = nlohmann::json::array();
            for (const auto& [lo, hi] : r.extra_brackets) xb.push_back({lo, hi});
            j["extra_brackets"] = xb;
        }
        return j.dump(2) + "\n";
    }
    std::string out;
    out += "method: " + r.method + "\n";
    if (r.method == "series") {
        out += "n: " + std::to_string(r.n) + "\n";
        out += "xi: " + r.xi + "\n";
    } else {
        out += "states: " + std::to_string(r.states) + "\n";
        out += "eigenvalues: " + std::to_string(r.eigenvalues) + "\n";
    }
    out += "working digits: " + std::to_string(r.working_digits) + "\n";
    out += "lo: " + r.lo + "\n";
    out += "hi: " + r.hi + "\n";
    out += "certified: " + std::to_string(r.certified_count) + " digits\n";
    out += detail::wrap_digits(r.certified_digits, 100);
    out += "reference match: " + std::to_string(r.reference_match) + " digits\n";
    for (size_t i = 0; i < r.extra_brackets.size(); ++i)
        out += "eigenvalue " + std::to_string(i + 1) + ": [" + r.extra_brackets[i].first +
               ", " + r.extra_brackets[i].second + "]\n";
    if (!r.timings.empty()) {
        out += "stage timings (s):";
        char buf[32];
        for (double t : r.timings) {
            std::snprintf(buf, sizeof buf, " %.3f", t);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline RunReport parse_report(const std::string& bytes) {
    nlohmann::json j = nlohmann::json::parse(bytes);
    RunReport r;
    r.method = j.at("method").get<std::string>();
    r.n = j.value("n", 0L);
    r.xi = j.value("xi", std::string());
    r.states = j.value("states", 0L);
    r.eigenvalues = j.value("eigenvalues", 0L);
    r.working_digits = j.value("working_digits", 0L);
    r.lo = j.at("lo").get<std::string>();
    r.hi = j.at("hi").get<std::string>();
    r.certified_digits = j.at("certified_digits").get<std::string>();
    r.certified_count = j.at("certified_count").get<long>();
    r.reference_match = j.at("reference_match").get<long>();
    if (j.contains("timings")) r.timings = j["timings"].get<std::vector<double>>();
    if (j.contains("extra_brackets"))
        for (const auto& xb : j["extra_brackets"])
            r.extra_brackets.emplace_back(xb.at(0).get<std::string>(),
                                          xb.at(1).get<std::string>());
    return r;
}

/// CSV of the bounding-figure curves: header x,lambda,y,y_prime, one row per
/// (x, lambda) cell, values at 20 significant digits. Lambda varies in the
/// outer loop.
inline std::string emit_curves_csv(const CurveSet& c) {
    std::string out = "x,lambda,y,y_prime\n";
    for (size_t i = 0; i < c.lambdas.size(); ++i)
        for (size_t jx = 0; jx < c.x_samples.size(); ++jx) {
            out += to_decimal(c.x_samples[jx], 20);
            out += ',';
            out += to_decimal(c.lambdas[i], 20);
            out += ',';
            out += to_decimal(c.y_values[i][jx], 20);
            out += ',';
            out += to_decimal(c.y_prime_values[i][jx], 20);
            out += '\n';
        }
    return out;
}

/// Binary PGM (P5, maxval 255). Pixel value is a log map of |v| against the
/// matrix maximum with floor v_max * 10^-gamma; exact zeros map to 0.
inline std::string emit_pgm(const std::vector<std::vector<BigReal>>& m, double gamma = 16.0) {
    if (m.empty() || m[0].empty()) throw std::invalid_argument("emit_pgm: empty matrix");
    size_t rows = m.size();
    size_t cols = m[0].size();
    for (const auto& row : m)
        if (row.size() != cols) throw std::invalid_argument("emit_pgm: ragged matrix");

    const BigReal* vmax = nullptr;
    for (const auto& row : m)
        for (const BigReal& v : row)
            if (!vmax || mpfr_cmpabs(v.raw(), vmax->raw()) > 0) vmax = &v;

    std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    bool all_zero = vmax == nullptr || vmax->is_zero();
    double denom = std::log10(1.0 + std::pow(10.0, gamma));
    for (const auto& row : m)
        for (const BigReal& v : row) {
            unsigned char pix = 0;
            if (!all_zero && !v.is_zero()) {
                mpfr_t r;
                mpfr_init2(r, 64);
                mpfr_div(r, v.raw(), vmax->raw(), MPFR_RNDN);
                mpfr_abs(r, r, MPFR_RNDN);
                double ratio = mpfr_get_d(r, MPFR_RNDN);
                mpfr_clear(r);
                double f = std::log10(1.0 + ratio * std::pow(10.0, gamma)) / denom;
                long p = std::lround(255.0 * f);
                pix = static_cast<unsigned char>(p < 0 ? 0 : (p > 255 ? 255 : p));
            }
            out += static_cast<char>(pix);
        }
    return out;
}

}  // namespace qanho

#endif  // QANHO_REPORT_HPP
