#ifndef QANHO_BOUND_HPP
#define QANHO_BOUND_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qanho/precision.hpp"
#include "qanho/series.hpp"

namespace qanho {

/// Certified enclosure of the ground-state eigenvalue: lo is the lambda-zero
/// of y'_n(xi), hi the lambda-zero of y_n(xi), both widened to the outer hull
/// of the final root-finder sign brackets.
struct Bracket {
    BigReal lo;
    BigReal hi;
    int stage = 0;
    BigReal xi;
    long n = 0;
};

struct ScheduleStage {
    std::string xi;       // decimal string, exact schedule datum
    long n = 0;           // truncation order
    long working_digits = 0;
    std::string tol;      // root-finder tolerance, decimal string
    long target_digits = 0;
};

struct Schedule {
    std::vector<ScheduleStage> stages;
};

// A failed stage, carrying the last good checkpoint (empty when none).
struct StageError : std::runtime_error {
    StageError(int stage_, std::string checkpoint_, const std::string& what_)
        : std::runtime_error(what_), stage(stage_), checkpoint(std::move(checkpoint_)) {}
    int stage;
    std::string checkpoint;
};

inline void validate(const Schedule& s) {
    if (s.stages.empty()) throw std::invalid_argument("Schedule: no stages");
    auto xi_of = [](const ScheduleStage& st) { return std::stod(st.xi); };
    for (size_t i = 1; i < s.stages.size(); ++i) {
        const ScheduleStage& a = s.stages[i - 1];
        const ScheduleStage& b = s.stages[i];
        if (xi_of(b) < xi_of(a) || b.n < a.n || b.working_digits < a.working_digits)
            throw std::invalid_argument(
                "Schedule: xi, n and working_digits must be non-decreasing across stages");
    }
}

inline std::uint64_t schedule_hash(const Schedule& s) {
    std::string canon;
    for (const ScheduleStage& st : s.stages) {
        canon += st.xi;
        canon += ',';
        canon += std::to_string(st.n);
        canon += ',';
        canon += std::to_string(st.working_digits);
        canon += ',';
        canon += st.tol;
        canon += ';';
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail {

constexpr double kLn10 = 2.302585092994045684;

// xi in tenths so the schedule is exact decimal data: smallest multiple of
// 0.1 at or above (t * 3 ln10 / 2)^(1/3).
inline long xi_tenths_for_target(long t) {
    double v = std::cbrt(static_cast<double>(t) * 3.0 * kLn10 / 2.0);
    return static_cast<long>(std::ceil(v * 10.0 - 1e-9));
}

inline ScheduleStage stage_for(long target, long xi_tenths) {
    ScheduleStage st;
    st.target_digits = target;
    st.xi = std::to_string(xi_tenths / 10) + "." + std::to_string(xi_tenths % 10);
    st.n = (4 * xi_tenths * xi_tenths * xi_tenths + 999) / 1000;
    if (st.n % 2 != 0) ++st.n;
    double xi = static_cast<double>(xi_tenths) / 10.0;
    long cancel = static_cast<long>(std::ceil(2.0 * xi * xi * xi / (3.0 * kLn10)));
    st.working_digits = target + cancel + 10;
    st.tol = "1e-" + std::to_string(cancel + 4);
    return st;
}

}  // namespace detail

/// Staged (xi, n, working precision) escalation ending at the requested digit
/// count; per-stage digit targets double up to the final target.
inline Schedule default_schedule(long target_digits) {
    if (target_digits < 10)
        throw std::invalid_argument("default_schedule: target_digits must be >= 10");
    std::vector<long> targets{target_digits};
    while (targets.back() > 24) targets.push_back((targets.back() + 1) / 2);
    Schedule s;
    for (auto it = targets.rbegin(); it != targets.rend(); ++it)
        s.stages.push_back(detail::stage_for(*it, detail::xi_tenths_for_target(*it)));
    validate(s);
    return s;
}

struct SeedInterval {
    BigReal lo;
    BigReal hi;
};

namespace detail {

// Locate a sign-change bracket for f inside (or, failing that, around) the
// seed interval: endpoints first, then a 32-step scan, then geometric
// widening around the seed center.
template <class F>
RootResult bracketed_root(F&& f, const SeedInterval& seed, const PrecisionContext& ctx,
                          const BigReal& tol, const char* label) {
    BigReal a = ctx.convert(seed.lo);
    BigReal b = ctx.convert(seed.hi);
    for (int round = 0; round <= 6; ++round) {
        if (f(a).sgn() * f(b).sgn() < 0) return find_root_detailed(f, a, b, ctx, tol);
        if (auto sc = sign_scan(f, a, b, 32, ctx))
            return find_root_detailed(f, sc->lo, sc->hi, ctx, tol);
        BigReal c = (a + b) / 2;
        BigReal w = b - a;
        a = c - w;
        b = c + w;
    }
    throw NoSignChange(std::string("lambda_bounds: no sign change for ") + label +
                       " in the seed interval (truncation too short for this xi, "
                       "or seed interval wrong)");
}

}  // namespace detail

/// One shot of the bounding algorithm at fixed (n, xi): brackets lambda_0
/// between the lambda-zeros of y'_n(xi) and y_n(xi).
inline Bracket lambda_bounds(long n, const BigReal& xi, const SeedInterval& seed,
                             const PrecisionContext& ctx, const BigReal& tol) {
    if (!(seed.lo < seed.hi)) throw std::invalid_argument("lambda_bounds: empty seed interval");
    BigReal xi_c = ctx.convert(xi);
    auto f_y = [&](const BigReal& lambda) {
        return eval_y(SeriesConfig{n, xi_c, lambda}, ctx).value;
    };
    auto f_yp = [&](const BigReal& lambda) {
        return eval_y_prime(SeriesConfig{n, xi_c, lambda}, ctx).value;
    };
    RootResult r_y = detail::bracketed_root(f_y, seed, ctx, tol, "y");
    RootResult r_yp = detail::bracketed_root(f_yp, seed, ctx, tol, "y'");

    Bracket b{BigReal(ctx), BigReal(ctx), 0, std::move(xi_c), n};
    // lower bound from the y' root, upper from the y root; keep the outer
    // hull of the final sign brackets so the enclosure stays certified
    b.lo = r_yp.lo < r_y.lo ? r_yp.lo : r_y.lo;
    b.hi = r_y.hi > r_yp.hi ? r_y.hi : r_yp.hi;
    if (!(b.lo < b.hi))
        throw ConvergenceError("lambda_bounds: degenerate bracket (roots coincide)");
    return b;
}

namespace detail {

inline std::pair<std::string, long> common_decimal_prefix(const std::string& lo_str,
                                                          const std::string& hi_str) {
    size_t n = std::min(lo_str.size(), hi_str.size());
    size_t i = 0;
    while (i < n && lo_str[i] == hi_str[i] && lo_str[i] != 'e') ++i;
    std::string prefix = lo_str.substr(0, i);
    long digits = 0;
    for (char c : prefix)
        if (c >= '0' && c <= '9') ++digits;
    return {std::move(prefix), digits};
}

}  // namespace detail

/// Longest common prefix of the decimal expansions of lo and hi (digits
/// counted without the decimal point). Expansions are truncated, never
/// rounded, so the prefix is shared by every value in the bracket.
inline std::pair<std::string, long> certified_digits(const Bracket& b) {
    if (b.hi < b.lo) throw std::invalid_argument("certified_digits: requires lo <= hi");
    long d = std::min(b.lo.context().effective_digits(), b.hi.context().effective_digits());
    return detail::common_decimal_prefix(detail::format_decimal_trunc(b.lo.raw(), d),
                                         detail::format_decimal_trunc(b.hi.raw(), d));
}

/// String-pair variant for already-expanded decimal values.
inline std::pair<std::string, long> certified_digits(const std::string& lo_str,
                                                     const std::string& hi_str) {
    return detail::common_decimal_prefix(lo_str, hi_str);
}

struct StageOutcome {
    int stage = 0;
    ScheduleStage params;      // working_digits holds the precision actually used
    std::string lo;            // exact round-trip decimal of the bracket ends
    std::string hi;
    long certified = 0;
    double seconds = 0.0;
};

struct GroundStateResult {
    Bracket bracket;
    std::string digits;
    long certified_count = 0;
    std::vector<StageOutcome> stages;
};

struct StagedOptions {
    std::optional<Schedule> schedule;
    std::string checkpoint_path;
    bool resume = false;
    int max_stages = -1;  // stop early after this many stages (testing hook)
};

namespace detail {

struct CheckpointData {
    int stage = 0;
    std::string xi;
    long n = 0;
    long working_digits = 0;
    std::string lo;
    std::string hi;
    std::string schedule_hash;
};

inline void write_checkpoint(const std::string& path, const CheckpointData& c) {
    nlohmann::json j;
    j["stage"] = c.stage;
    j["xi"] = c.xi;
    j["n"] = c.n;
    j["working_digits"] = c.working_digits;
    j["lo"] = c.lo;
    j["hi"] = c.hi;
    j["schedule_hash"] = c.schedule_hash;
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
        out << j.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("checkpoint: cannot rename " + tmp + " to " + path);
}

inline CheckpointData read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    CheckpointData c;
    c.stage = j.at("stage").get<int>();
    c.xi = j.at("xi").get<std::string>();
    c.n = j.at("n").get<long>();
    c.working_digits = j.at("working_digits").get<long>();
    c.lo = j.at("lo").get<std::string>();
    c.hi = j.at("hi").get<std::string>();
    c.schedule_hash = j.at("schedule_hash").get<std::string>();
    return c;
}

inline std::string hash_string(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

/// Runs the schedule stage by stage, re-seeding each root search from the
/// previous bracket midpoint widened by 4x the previous width. If the
/// schedule ends short of the target, up to three refinement stages with xi
/// bumped by 0.3 are appended.
inline GroundStateResult staged_ground_state(long target_digits,
                                             const StagedOptions& opt = {}) {
    Schedule schedule = opt.schedule ? *opt.schedule : default_schedule(target_digits);
    validate(schedule);
    const std::string hash = detail::hash_string(schedule_hash(schedule));
    const size_t base_stages = schedule.stages.size();

    GroundStateResult result;
    bool have_bracket = false;
    std::string prev_lo, prev_hi;
    long prev_working = 0;
    long certified_so_far = 0;
    size_t next_stage = 0;
    int extensions = 0;

    if (opt.resume) {
        if (opt.checkpoint_path.empty())
            throw std::invalid_argument("staged_ground_state: resume requires a checkpoint path");
        detail::CheckpointData c = detail::read_checkpoint(opt.checkpoint_path);
        if (c.schedule_hash != hash)
            throw StageError(c.stage, opt.checkpoint_path,
                             "staged_ground_state: checkpoint belongs to a different schedule");
        next_stage = static_cast<size_t>(c.stage) + 1;
        prev_lo = c.lo;
        prev_hi = c.hi;
        prev_working = c.working_digits;
        have_bracket = true;
        {
            // same digit count the original run recorded for this stage
            PrecisionContext cctx =
                make_context(prev_working, PrecisionContext::default_guard(prev_working));
            Bracket restored{cctx.from_string(prev_lo), cctx.from_string(prev_hi), c.stage,
                             BigReal(cctx), c.n};
            certified_so_far = certified_digits(restored).second;
        }
        // Stage indices past the base schedule are refinement stages; rebuild
        // them deterministically so the hash-validated indices line up.
        while (schedule.stages.size() < next_stage && extensions < 3) {
            long tenths = detail::xi_tenths_for_target(
                              schedule.stages[base_stages - 1].target_digits) +
                          3 * static_cast<long>(schedule.stages.size() - base_stages + 1);
            schedule.stages.push_back(detail::stage_for(target_digits, tenths));
            ++extensions;
        }
    }

    int stages_run = 0;
    while (true) {
        if (next_stage >= schedule.stages.size()) {
            if (have_bracket && certified_so_far >= target_digits) break;
            if (extensions >= 3) {
                if (!have_bracket)
                    throw StageError(static_cast<int>(next_stage), opt.checkpoint_path,
                                     "staged_ground_state: no stage produced a bracket");
                throw StageError(
                    static_cast<int>(next_stage) - 1, opt.checkpoint_path,
                    "staged_ground_state: certified " + std::to_string(certified_so_far) +
                        " digits after refinement, target " + std::to_string(target_digits));
            }
            long last_tenths = detail::xi_tenths_for_target(
                schedule.stages[base_stages - 1].target_digits);
            long tenths = last_tenths + 3 * (extensions + 1);
            schedule.stages.push_back(detail::stage_for(target_digits, tenths));
            ++extensions;
        }
        if (opt.max_stages >= 0 && stages_run >= opt.max_stages) break;

        const size_t j = next_stage;
        const ScheduleStage& st = schedule.stages[j];
        auto t0 = std::chrono::steady_clock::now();

        // Working precision: start from the schedule estimate, then add the
        // cancellation measured by a probe evaluation at the seed midpoint.
        long working = std::max(st.working_digits, prev_working);
        PrecisionContext ctx = make_context(working, PrecisionContext::default_guard(working));

        SeedInterval seed{BigReal(ctx), BigReal(ctx)};
        if (!have_bracket) {
            seed.lo = ctx.from_string("1.05");
            seed.hi = ctx.from_string("1.08");
        } else {
            PrecisionContext prev_ctx =
                make_context(prev_working, PrecisionContext::default_guard(prev_working));
            BigReal lo = ctx.convert(prev_ctx.from_string(prev_lo));
            BigReal hi = ctx.convert(prev_ctx.from_string(prev_hi));
            BigReal mid = (lo + hi) / 2;
            BigReal w = hi - lo;
            if (w.is_zero()) w = abs(mid) * ctx.pow10(-certified_so_far);
            seed.lo = mid - w * 2;
            seed.hi = mid + w * 2;
        }

        BigReal xi = ctx.from_string(st.xi);
        {
            BigReal probe_lambda = (seed.lo + seed.hi) / 2;
            SeriesPair probe = eval_y_and_prime(SeriesConfig{st.n, xi, probe_lambda}, ctx);
            long measured =
                std::max(cancellation_digits(probe.y), cancellation_digits(probe.y_prime));
            long needed = st.target_digits + measured + 10;
            if (needed > working) {
                working = needed;
                ctx = make_context(working, PrecisionContext::default_guard(working));
                xi = ctx.from_string(st.xi);
                seed.lo = ctx.convert(seed.lo);
                seed.hi = ctx.convert(seed.hi);
            }
        }

        Bracket b{BigReal{ctx}, BigReal{ctx}, 0, BigReal{ctx}, 0};
        try {
            b = lambda_bounds(st.n, xi, seed, ctx, ctx.from_string(st.tol));
        } catch (const std::exception& e) {
            throw StageError(static_cast<int>(j), opt.checkpoint_path,
                             "stage " + std::to_string(j) + ": " + e.what());
        }
        b.stage = static_cast<int>(j);

        auto [digits, count] = certified_digits(b);
        if (have_bracket && count < certified_so_far)
            throw StageError(static_cast<int>(j), opt.checkpoint_path,
                             "stage " + std::to_string(j) + ": certified digits regressed");

        StageOutcome out;
        out.stage = static_cast<int>(j);
        out.params = st;
        out.params.working_digits = working;
        out.lo = b.lo.to_string_exact();
        out.hi = b.hi.to_string_exact();
        out.certified = count;
        out.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.stages.push_back(out);

        if (!opt.checkpoint_path.empty()) {
            detail::CheckpointData c{static_cast<int>(j), st.xi, st.n, working,
                                     out.lo,              out.hi, hash};
            detail::write_checkpoint(opt.checkpoint_path, c);
        }

        result.bracket = std::move(b);
        result.digits = digits;
        result.certified_count = count;
        certified_so_far = count;
        prev_lo = out.lo;
        prev_hi = out.hi;
        prev_working = working;
        have_bracket = true;
        ++next_stage;
        ++stages_run;
    }

    if (!have_bracket)
        throw StageError(0, opt.checkpoint_path, "staged_ground_state: nothing to do");
    if (result.digits.empty()) {
        // Resumed past the final stage: rebuild the result from the checkpoint.
        PrecisionContext ctx =
            make_context(prev_working, PrecisionContext::default_guard(prev_working));
        Bracket b{ctx.from_string(prev_lo), ctx.from_string(prev_hi),
                  static_cast<int>(next_stage) - 1, BigReal(ctx), 0};
        auto [digits, count] = certified_digits(b);
        result.bracket = std::move(b);
        result.digits = digits;
        result.certified_count = count;
    }
    return result;
}

}  // namespace qanho

#endif  // QANHO_BOUND_HPP
