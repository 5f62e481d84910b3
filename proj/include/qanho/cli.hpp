#ifndef QANHO_CLI_HPP
#define QANHO_CLI_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qanho/basis.hpp"
#include "qanho/bound.hpp"
#include "qanho/hill.hpp"
#include "qanho/precision.hpp"
#include "qanho/report.hpp"
#include "qanho/series.hpp"

namespace qanho {

namespace cli_detail {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void write_output(const std::string& payload, const std::string& out) {
    if (out.empty() || out == "-") {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + out);
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

inline long count_digit_chars(const std::string& s) {
    return std::count_if(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Decimal-string flags never pass through machine floats; reject junk at
// parse time with a throwaway context.
inline void check_decimal(const std::string& s, const char* flag) {
    try {
        make_context(10, 0).from_string(s);
    } catch (const std::invalid_argument&) {
        throw UsageError(std::string(flag) + ": not a decimal number: '" + s + "'");
    }
}

struct GroundStateArgs {
    long digits = 50;
    std::string xi;
    long terms = 0;
    long working = 0;
    std::string checkpoint;
    bool resume = false;
    std::string out = "-";
    bool json = false;
    bool text = false;
};

inline RunReport series_report(const GroundStateResult& res) {
    RunReport r;
    r.method = "series";
    if (!res.stages.empty()) {
        const StageOutcome& last = res.stages.back();
        r.n = last.params.n;
        r.xi = last.params.xi;
        r.working_digits = last.params.working_digits;
        for (const StageOutcome& st : res.stages) r.timings.push_back(st.seconds);
    }
    r.lo = res.bracket.lo.to_string_exact();
    r.hi = res.bracket.hi.to_string_exact();
    r.certified_digits = res.digits;
    r.certified_count = res.certified_count;
    r.reference_match = compare_digits(res.digits, reference_eps0());
    return r;
}

inline int cmd_ground_state(const GroundStateArgs& a) {
    if (a.digits < 10) throw UsageError("--digits must be >= 10");
    if (a.resume && a.checkpoint.empty()) throw UsageError("--resume requires --checkpoint");
    if (a.terms != 0 && (a.terms < 6 || a.terms % 2 != 0))
        throw UsageError("--terms must be even and >= 6");
    if (a.working != 0 && a.working < a.digits)
        throw UsageError("--working-digits must be >= --digits");
    if (!a.xi.empty()) check_decimal(a.xi, "--xi");

    Schedule sched = default_schedule(a.digits);
    if (!a.xi.empty()) {
        // replacing xi refreshes the derived tolerance and precision estimate
        double xi = std::stod(a.xi);
        long tenths = static_cast<long>(xi * 10.0 + 0.5);
        ScheduleStage fresh = detail::stage_for(a.digits, tenths);
        fresh.xi = a.xi;
        fresh.n = sched.stages.back().n > fresh.n ? sched.stages.back().n : fresh.n;
        sched.stages.back() = fresh;
    }
    if (a.terms != 0) sched.stages.back().n = a.terms;
    if (a.working != 0) sched.stages.back().working_digits = a.working;
    try {
        validate(sched);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("conflicting overrides: ") + e.what());
    }

    StagedOptions opt;
    opt.schedule = sched;
    opt.checkpoint_path = a.checkpoint;
    opt.resume = a.resume;
    GroundStateResult res = staged_ground_state(a.digits, opt);
    RunReport r = series_report(res);
    write_output(emit_report(r, a.json ? ReportFormat::json : ReportFormat::text), a.out);
    return 0;
}

struct HillArgs {
    long states = 100;
    long eigenvalues = 1;
    long working = 0;
    long digits = 0;
    std::string out = "-";
    bool json = false;
    bool text = false;
};

inline int cmd_hill(const HillArgs& a) {
    if (a.states < 1) throw UsageError("--states must be >= 1");
    if (a.eigenvalues < 1 || a.eigenvalues > a.states)
        throw UsageError("--eigenvalues must be in [1, states]");
    long expected = a.states / 5 + 5;  // about 0.2 digits per state
    long working = a.working != 0 ? a.working : std::max<long>(50, 10 * expected);
    if (working < 10) throw UsageError("--working-digits must be >= 10");
    long digits = a.digits != 0 ? a.digits : std::max<long>(10, working / 2);
    if (digits + 5 > working)
        throw UsageError("--digits too large for --working-digits");

    auto t0 = std::chrono::steady_clock::now();
    PrecisionContext ctx = make_context(working, PrecisionContext::default_guard(working));
    BandedSymMatrix M = build_hamiltonian(a.states, Parity::even, ctx);
    std::vector<Bracket> brs = lowest_eigenvalues(M, a.eigenvalues, ctx, ctx.pow10(-digits - 2));

    RunReport r;
    r.method = "hill";
    r.states = a.states;
    r.eigenvalues = a.eigenvalues;
    r.working_digits = working;
    r.lo = brs[0].lo.to_string_exact();
    r.hi = brs[0].hi.to_string_exact();
    auto [cert, count] = certified_digits(brs[0]);
    r.certified_digits = cert;
    r.certified_count = count;
    r.reference_match = compare_digits(cert, reference_eps0());
    for (size_t i = 1; i < brs.size(); ++i)
        r.extra_brackets.emplace_back(brs[i].lo.to_string_exact(), brs[i].hi.to_string_exact());
    r.timings.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    write_output(emit_report(r, a.json ? ReportFormat::json : ReportFormat::text), a.out);
    return 0;
}

struct CurvesArgs {
    long terms = 80;
    std::string lambda_min = "1.05";
    std::string lambda_max = "1.08";
    long count = 10;
    std::string x_max = "4";
    long samples = 200;
    long working = 30;
    std::string out = "-";
};

inline int cmd_curves(const CurvesArgs& a) {
    if (a.count < 2) throw UsageError("--count must be >= 2");
    if (a.samples < 2) throw UsageError("--samples must be >= 2");
    if (a.terms < 6 || a.terms % 2 != 0) throw UsageError("--terms must be even and >= 6");
    if (a.working < 21) throw UsageError("--working-digits must be >= 21 for 20-digit CSV");
    check_decimal(a.lambda_min, "--lambda-min");
    check_decimal(a.lambda_max, "--lambda-max");
    check_decimal(a.x_max, "--x-max");
    PrecisionContext ctx = make_context(a.working, PrecisionContext::default_guard(a.working));
    CurveSet c = sample_curves(a.terms, ctx.from_string(a.lambda_min),
                               ctx.from_string(a.lambda_max), a.count,
                               ctx.from_string(a.x_max), a.samples, ctx);
    write_output(emit_curves_csv(c), a.out);
    return 0;
}

struct EigvecMapArgs {
    long states = 100;
    long working = 60;
    std::string out = "-";
};

inline int cmd_eigvec_map(const EigvecMapArgs& a) {
    if (a.states < 2) throw UsageError("--states must be >= 2");
    if (a.working < 10) throw UsageError("--working-digits must be >= 10");
    PrecisionContext ctx = make_context(a.working, PrecisionContext::default_guard(a.working));
    write_output(emit_pgm(eigenvector_matrix(a.states, ctx)), a.out);
    return 0;
}

inline int cmd_verify(const std::string& digits_file) {
    std::ifstream in(digits_file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + digits_file);
    std::stringstream buf;
    buf << in.rdbuf();
    RunReport r = parse_report(buf.str());

    long digit_chars = count_digit_chars(r.certified_digits);
    long recomputed = compare_digits(r.certified_digits, reference_eps0());
    long expected = std::min(r.certified_count, kReferenceDigitCount);
    bool ok = true;
    std::string verdict;
    if (digit_chars != r.certified_count) {
        ok = false;
        verdict = "certified_count " + std::to_string(r.certified_count) +
                  " does not match digit string length " + std::to_string(digit_chars);
    } else if (recomputed != r.reference_match) {
        ok = false;
        verdict = "reference_match " + std::to_string(r.reference_match) +
                  " does not match recomputed " + std::to_string(recomputed);
    } else if (recomputed < expected) {
        ok = false;
        verdict = "certified digits disagree with the reference after " +
                  std::to_string(recomputed) + " digits";
    }
    if (ok) {
        std::printf("verify: OK (%ld certified digits, %ld match the reference)\n",
                    r.certified_count, recomputed);
        return 0;
    }
    std::fprintf(stderr, "verify: FAIL: %s\n", verdict.c_str());
    return 1;
}

inline int cmd_bench(long digits, const std::string& checkpoint) {
    if (digits < 10) throw UsageError("--digits must be >= 10");
    StagedOptions opt;
    opt.checkpoint_path = checkpoint;
    GroundStateResult res = staged_ground_state(digits, opt);
    std::printf("%-6s %-6s %-8s %-9s %-10s %s\n", "stage", "xi", "terms", "working",
                "certified", "seconds");
    for (const StageOutcome& st : res.stages)
        std::printf("%-6d %-6s %-8ld %-9ld %-10ld %.3f\n", st.stage, st.params.xi.c_str(),
                    st.params.n, st.params.working_digits, st.certified, st.seconds);
    double total = std::accumulate(res.stages.begin(), res.stages.end(), 0.0,
                                   [](double s, const StageOutcome& st) { return s + st.seconds; });
    std::printf("total: %.3f s, certified %ld digits\n", total, res.certified_count);
    return 0;
}

}  // namespace cli_detail

/// Command-line front end. Args come in normal order without the program
/// name. Exit codes: 0 success, 1 computational failure, 2 usage error.
inline int run_cli(std::vector<std::string> args) {
    using namespace cli_detail;
    CLI::App app{"certified digit-brackets for the quartic anharmonic oscillator ground state"};
    app.require_subcommand(1);

    GroundStateArgs gs;
    CLI::App* c_gs = app.add_subcommand("ground-state",
                                        "staged series bounding run (the record algorithm)");
    c_gs->add_option("--digits", gs.digits, "target certified digits");
    c_gs->add_option("--xi", gs.xi, "override final-stage evaluation point (decimal string)");
    c_gs->add_option("--terms", gs.terms, "override final-stage truncation order");
    c_gs->add_option("--working-digits", gs.working, "override final-stage working precision");
    c_gs->add_option("--checkpoint", gs.checkpoint, "checkpoint file, written after each stage");
    c_gs->add_flag("--resume", gs.resume, "resume from the checkpoint file");
    c_gs->add_option("--out", gs.out, "output path or - for stdout");
    c_gs->add_flag("--json", gs.json, "JSON report");
    c_gs->add_flag("--text", gs.text, "text report");
    c_gs->add_option("outfile", gs.out, "output path or - for stdout");

    HillArgs hl;
    CLI::App* c_hl = app.add_subcommand("hill", "banded Hill-matrix eigenvalues (cross-check)");
    c_hl->add_option("--states", hl.states, "even-parity basis states");
    c_hl->add_option("--eigenvalues", hl.eigenvalues, "how many lowest eigenvalues");
    c_hl->add_option("--working-digits", hl.working, "working precision");
    c_hl->add_option("--digits", hl.digits, "bracket digit target");
    c_hl->add_option("--out", hl.out, "output path or - for stdout");
    c_hl->add_flag("--json", hl.json, "JSON report");
    c_hl->add_flag("--text", hl.text, "text report");
    c_hl->add_option("outfile", hl.out, "output path or - for stdout");

    CurvesArgs cv;
    CLI::App* c_cv = app.add_subcommand("curves", "bounding-figure curve data as CSV");
    c_cv->add_option("--terms", cv.terms, "series truncation order");
    c_cv->add_option("--lambda-min", cv.lambda_min, "lambda sweep start (decimal string)");
    c_cv->add_option("--lambda-max", cv.lambda_max, "lambda sweep end (decimal string)");
    c_cv->add_option("--count", cv.count, "lambda sample count");
    c_cv->add_option("--x-max", cv.x_max, "largest x sample (decimal string)");
    c_cv->add_option("--samples", cv.samples, "x sample count");
    c_cv->add_option("--working-digits", cv.working, "working precision");
    c_cv->add_option("--out", cv.out, "output path or - for stdout");
    c_cv->add_option("outfile", cv.out, "output path or - for stdout");

    EigvecMapArgs em;
    CLI::App* c_em = app.add_subcommand("eigvec-map", "eigenvector-matrix figure as binary PGM");
    c_em->add_option("--states", em.states, "basis states (both parities)");
    c_em->add_option("--working-digits", em.working, "working precision");
    c_em->add_option("--out", em.out, "output path or - for stdout");
    c_em->add_option("outfile", em.out, "output path or - for stdout");

    std::string verify_file;
    CLI::App* c_vf = app.add_subcommand("verify", "re-check a JSON report against the reference");
    c_vf->add_option("--digits-file", verify_file, "report to verify")->required();

    long bench_digits = 50;
    std::string bench_checkpoint;
    CLI::App* c_bn = app.add_subcommand("bench", "per-stage timing table");
    c_bn->add_option("--digits", bench_digits, "target certified digits");
    c_bn->add_option("--checkpoint", bench_checkpoint, "checkpoint file");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_gs->parsed()) {
            if (gs.json && gs.text) throw UsageError("--json and --text conflict");
            return cmd_ground_state(gs);
        }
        if (c_hl->parsed()) {
            if (hl.json && hl.text) throw UsageError("--json and --text conflict");
            return cmd_hill(hl);
        }
        if (c_cv->parsed()) return cmd_curves(cv);
        if (c_em->parsed()) return cmd_eigvec_map(em);
        if (c_vf->parsed()) return cmd_verify(verify_file);
        if (c_bn->parsed()) return cmd_bench(bench_digits, bench_checkpoint);
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (!e.checkpoint.empty())
            std::fprintf(stderr, "last good checkpoint: %s\n", e.checkpoint.c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace qanho

#endif  // QANHO_CLI_HPP
