#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "padicprob/complexity.hpp"
#include "padicprob/frequency.hpp"
#include "padicprob/io.hpp"
#include "padicprob/padic.hpp"
#include "padicprob/realization.hpp"
#include "padicprob/scenario.hpp"
#include "padicprob/stats.hpp"

namespace padicprob::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kOutputEnv = "PADICPROB_OUTPUT_DIR";

/// Signals a verification or statistical failure after output was written.
struct Failure {
    std::string message;
};

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv(kOutputEnv); env && *env) {
        return env;
    }
    return ".";
}

std::string valuation_text(const Valuation& v) {
    return v ? std::to_string(*v) : "inf";
}

/// A p-adic operand: a literal `p:.. v:.. d:..`, `sqrt(<rational>)`, or a
/// rational expanded to `digits` digits past its valuation.
PAdicApprox parse_operand(const std::string& text, PrimeBase base, std::int64_t digits) {
    if (text.rfind("p:", 0) == 0) {
        auto x = PAdicApprox::parse(text);
        if (!(x.base() == base)) {
            throw std::invalid_argument("literal '" + text + "' is not in base " + std::to_string(base.value()));
        }
        return x;
    }
    if (text.rfind("sqrt(", 0) == 0 && text.back() == ')') {
        const auto radicand = Rational::parse(text.substr(5, text.size() - 6));
        auto root = hensel_sqrt(radicand, base, digits);
        if (!root) {
            throw std::invalid_argument(radicand.to_string() + " has no square root in Q_" +
                                        std::to_string(base.value()));
        }
        return *root;
    }
    return to_digits(Rational::parse(text), base, digits);
}

std::string render_value(const PAdicApprox& x, const std::string& format) {
    if (format == "literal") {
        return x.to_literal();
    }
    if (format == "rational") {
        return from_digits(x).to_string();
    }
    return x.render();
}

void write_output(const fs::path& path, std::string_view content, std::ostream& out, bool verbose) {
    write_file_atomic(path, content);
    if (verbose) {
        out << "wrote " << path.string() << '\n';
    }
}

// --- padic -----------------------------------------------------------------

struct PadicArgs {
    std::uint64_t prime = 0;
    std::string q, a, b, op, format = "render";
    std::int64_t digits = 8;
};

void add_padic(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* cmd = app.add_subcommand("padic", "p-adic valuation, norm, metric, expansion, arithmetic and roots");
    cmd->require_subcommand(1);
    auto args = std::make_shared<PadicArgs>();

    auto prime_opt = [&](CLI::App* sub) { sub->add_option("-p,--prime", args->prime, "prime base p")->required(); };
    auto format_opt = [&](CLI::App* sub) {
        sub->add_option("--format", args->format, "render | literal | rational")
            ->capture_default_str()
            ->check(CLI::IsMember({"render", "literal", "rational"}));
    };

    auto* expand = cmd->add_subcommand("expand", "canonical digit expansion of a rational");
    prime_opt(expand);
    expand->add_option("-q,--rational", args->q, "rational <num>[/<den>]")->required()->allow_extra_args(false);
    expand->add_option("-k,--digits", args->digits, "digits past the valuation")->capture_default_str();
    format_opt(expand);
    expand->callback([args, &action, &out] {
        action = [args, &out] {
            const PrimeBase base(args->prime);
            out << render_value(to_digits(Rational::parse(args->q), base, args->digits), args->format) << '\n';
        };
    });

    auto* norm_cmd = cmd->add_subcommand("norm", "|q|_p as an exact rational");
    prime_opt(norm_cmd);
    norm_cmd->add_option("-q,--rational", args->q, "rational")->required();
    norm_cmd->callback([args, &action, &out] {
        action = [args, &out] { out << norm(Rational::parse(args->q), PrimeBase(args->prime)).to_string() << '\n'; };
    });

    auto* val = cmd->add_subcommand("valuation", "ord_p q, or inf for 0");
    prime_opt(val);
    val->add_option("-q,--rational", args->q, "rational")->required();
    val->callback([args, &action, &out] {
        action = [args, &out] {
            out << valuation_text(valuation(Rational::parse(args->q), PrimeBase(args->prime))) << '\n';
        };
    });

    auto* dist = cmd->add_subcommand("distance", "|a - b|_p");
    prime_opt(dist);
    dist->add_option("-a", args->a, "rational")->required();
    dist->add_option("-b", args->b, "rational")->required();
    dist->callback([args, &action, &out] {
        action = [args, &out] {
            out << distance(Rational::parse(args->a), Rational::parse(args->b), PrimeBase(args->prime)).to_string()
                << '\n';
        };
    });

    auto* arith = cmd->add_subcommand("arith", "add, sub, mul or div of two operands with tracked precision");
    prime_opt(arith);
    arith->add_option("op", args->op, "add | sub | mul | div")->required()->check(
        CLI::IsMember({"add", "sub", "mul", "div"}));
    arith->add_option("-a", args->a, "operand: rational, sqrt(<rational>) or p-adic literal")->required();
    arith->add_option("-b", args->b, "operand")->required();
    arith->add_option("-k,--digits", args->digits, "digits used to expand rational operands")->capture_default_str();
    format_opt(arith);
    arith->callback([args, &action, &out] {
        action = [args, &out] {
            const PrimeBase base(args->prime);
            const auto a = parse_operand(args->a, base, args->digits);
            const auto b = parse_operand(args->b, base, args->digits);
            PAdicApprox r = args->op == "add"   ? a + b
                            : args->op == "sub" ? a - b
                            : args->op == "mul" ? a * b
                                                : a / b;
            out << render_value(r, args->format) << '\n';
        };
    });

    auto* root = cmd->add_subcommand("sqrt", "Hensel-lifted square root (odd p)");
    prime_opt(root);
    root->add_option("-q,--rational", args->q, "radicand")->required();
    root->add_option("-k,--digits", args->digits, "digits past the valuation")->capture_default_str();
    format_opt(root);
    root->callback([args, &action, &out] {
        action = [args, &out] {
            const auto r = hensel_sqrt(Rational::parse(args->q), PrimeBase(args->prime), args->digits);
            if (!r) {
                out << "no-root\n";
                throw Failure{args->q + " is not a square in Q_" + std::to_string(args->prime)};
            }
            out << render_value(*r, args->format) << '\n';
        };
    });
}

// --- realize ---------------------------------------------------------------

struct RealizeArgs {
    std::uint64_t prime = 0;
    std::string target;
    std::int64_t depth = 0;
    double growth = 1.0;
    std::string fill = "block";
    std::string out_dir;
    bool text = false;
    std::string verify_sequence;
    std::string verify_plan;
    bool verbose = false;
};

PAdicApprox realize_target(const std::string& text, PrimeBase base, std::int64_t depth) {
    // Enough digits for every row: K past the shift.
    if (text.rfind("p:", 0) == 0) {
        return parse_operand(text, base, depth);
    }
    std::int64_t shift = 0;
    if (text.rfind("sqrt(", 0) != 0) {
        const auto v = valuation(Rational::parse(text), base);
        shift = v && *v < 0 ? -*v : 0;
    }
    return parse_operand(text, base, depth + shift);
}

void add_realize(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto args = std::make_shared<RealizeArgs>();
    auto* cmd = app.add_subcommand("realize", "build a sequence whose frequencies converge p-adically to a target");
    cmd->add_option("-p,--prime", args->prime, "prime base p")->required();
    cmd->add_option("-q,--target", args->target, "target: rational, sqrt(<rational>) or p-adic literal")->required();
    cmd->add_option("-K,--depth", args->depth, "number of checkpoints K")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--growth", args->growth, "minimum ratio N_k / N_(k-1)")->capture_default_str();
    cmd->add_option("--fill", args->fill, "window order: block | spread | shuffle:<seed>")->capture_default_str();
    cmd->add_option("-o,--out", args->out_dir, std::string("output directory (default $") + kOutputEnv + " or .)");
    cmd->add_flag("--text", args->text, "write sequence.txt instead of packed sequence.bits");
    cmd->add_option("--verify-only", args->verify_sequence, "re-verify an existing sequence file instead of building");
    cmd->add_option("--plan", args->verify_plan, "plan CSV used with --verify-only (default: rebuilt from the target)");
    cmd->add_flag("-v,--verbose", args->verbose, "report written files");
    cmd->callback([args, &action, &out] {
        action = [args, &out] {
            const PrimeBase base(args->prime);
            const auto target = realize_target(args->target, base, args->depth);
            const fs::path dir = output_dir(args->out_dir);
            VerificationReport report;
            if (!args->verify_sequence.empty()) {
                const auto seq = read_sequence(args->verify_sequence);
                const auto rows = args->verify_plan.empty() ? plan(target, args->depth, args->growth).rows
                                                            : parse_plan_csv(read_file(args->verify_plan));
                report = verify(seq, target, args->depth, rows);
            } else {
                const auto fill = FillPolicy::parse(args->fill);
                const auto pl = plan(target, args->depth, args->growth);
                const auto seq = generate(pl, fill);
                report = verify(seq, target, args->depth, pl.rows);
                const fs::path seq_path = dir / (args->text ? "sequence.txt" : "sequence.bits");
                write_sequence(seq_path, seq);
                if (args->verbose) {
                    out << "wrote " << seq_path.string() << '\n';
                }
                write_output(dir / "plan.csv", pl.to_csv(), out, args->verbose);
            }
            auto doc = ordered_json::parse(report.to_json());
            ordered_json summary{{"prime", args->prime},
                                 {"target", target.to_literal()},
                                 {"depth", args->depth},
                                 {"growth", args->growth},
                                 {"fill", FillPolicy::parse(args->fill).to_string()},
                                 {"version", PADICPROB_VERSION}};
            doc["provenance"] = summary;
            const std::string text = doc.dump(2) + "\n";
            write_output(dir / "verification.json", text, out, args->verbose);
            out << (report.pass ? "pass" : "FAIL") << ": " << report.rows.size() << " checkpoints, target "
                << target.render() << '\n';
            if (!report.pass) {
                throw Failure{"verification failed"};
            }
        };
    });
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::uint64_t prime = 0;
    std::int64_t digits = 8;
    double tolerance = 1e-3;
    std::size_t tail = 3;
    double growth_base = 0.0;
    std::string plan_csv;
    bool compressor = false;
    std::string out_dir;
    bool verbose = false;
};

ordered_json verdict_json(const StabilizationVerdict& v) {
    ordered_json doc{{"status", to_string(v.status)}};
    if (v.real_limit) {
        doc["limit"] = v.real_limit->to_string();
    } else if (v.padic_limit) {
        doc["limit"] = v.padic_limit->to_literal();
        doc["rendered"] = v.padic_limit->render();
    } else {
        doc["limit"] = nullptr;
    }
    doc["evidence"] = v.evidence.to_string();
    return doc;
}

void add_analyze(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto args = std::make_shared<AnalyzeArgs>();
    auto* cmd = app.add_subcommand("analyze", "stabilization verdicts and complexity growth of a sequence file");
    cmd->add_option("input", args->input, "sequence file (.bits or 0/1 text)")->required();
    cmd->add_option("-p,--prime", args->prime, "prime of the p-adic topology")->required();
    cmd->add_option("--digits", args->digits, "p-adic digits that must agree over the tail")->capture_default_str();
    cmd->add_option("--tolerance", args->tolerance, "real Cauchy tolerance")->capture_default_str();
    cmd->add_option("--tail", args->tail, "checkpoints in the stabilization tail")->capture_default_str();
    cmd->add_option("--growth-base", args->growth_base, "complexity profile base g (default p)");
    cmd->add_option("--plan", args->plan_csv, "take checkpoints from a plan CSV (default geometric in p)");
    cmd->add_flag("--compressor", args->compressor, "also profile with the deflate compressor");
    cmd->add_option("-o,--out", args->out_dir, std::string("output directory (default $") + kOutputEnv + " or .)");
    cmd->add_flag("-v,--verbose", args->verbose, "print fit diagnostics and written files");
    cmd->callback([args, &action, &out] {
        action = [args, &out] {
            const PrimeBase base(args->prime);
            const auto seq = read_sequence(args->input);
            if (seq.empty()) {
                throw std::invalid_argument("sequence file '" + args->input + "' is empty");
            }
            CollectiveParams params;
            params.tolerance = args->tolerance;
            params.tail = args->tail;
            params.digits = args->digits;
            if (!args->plan_csv.empty()) {
                for (const auto& row : parse_plan_csv(read_file(args->plan_csv))) {
                    if (row.total <= seq.size()) {
                        params.checkpoints.push_back(row.total);
                    }
                }
            }
            const auto report = classify_collective(seq, base, params);
            const double g = args->growth_base > 0 ? args->growth_base : static_cast<double>(args->prime);

            const fs::path dir = output_dir(args->out_dir);
            ordered_json doc;
            doc["provenance"] = {{"input", args->input},   {"length", seq.size()},         {"prime", args->prime},
                                 {"digits", args->digits}, {"tolerance", args->tolerance}, {"tail", args->tail},
                                 {"growth_base", g},       {"version", PADICPROB_VERSION}};
            doc["collective"] = to_string(report.kind);
            doc["real"] = verdict_json(report.real);
            doc["padic"] = verdict_json(report.padic);
            write_output(dir / "trace.csv", report.trace.to_csv(), out, args->verbose);

            ordered_json complexity;
            const auto lz = profile(seq, g);
            const auto lz_verdict = fit_growth(lz);
            complexity["lz76"] = ordered_json::parse(lz_verdict.to_json());
            write_output(dir / "profile-lz76.csv", lz.to_csv(), out, args->verbose);
            if (args->compressor) {
                const DeflateCompressor deflate;
                const CheckedCompressor checked(deflate);
                const auto cp = profile(seq, g, checked);
                complexity["deflate"] = ordered_json::parse(fit_growth(cp).to_json());
                write_output(dir / "profile-deflate.csv", cp.to_csv(), out, args->verbose);
            }
            doc["complexity"] = complexity;
            write_output(dir / "analysis.json", doc.dump(2) + "\n", out, args->verbose);

            out << "collective: " << to_string(report.kind) << " (real " << to_string(report.real.status)
                << ", " << args->prime << "-adic " << to_string(report.padic.status) << ")\n";
            out << "complexity: " << to_string(lz_verdict.kind) << (lz_verdict.flat ? " (flat)" : "") << '\n';
            if (args->verbose) {
                out << "  " << lz_verdict.decision << '\n';
            }
        };
    });
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string spec;
    std::string out_dir;
    std::size_t replicas = 1;
    bool verbose = false;
};

std::string with_provenance(const ScenarioSpec& spec, const std::string& csv) {
    return "# provenance " + provenance(spec).dump() + "\n" + csv;
}

struct ReplicaOutput {
    std::string ndjson;
    std::string histogram;
    std::vector<std::pair<std::string, std::string>> group_histograms;
    ordered_json metrics;
};

ReplicaOutput run_replica(const ScenarioSpec& spec) {
    const auto records = run_scenario(spec);
    ReplicaOutput r;
    r.ndjson = to_ndjson(spec, records);
    const auto all = aggregate(records, GroupBy::none, spec.apparatus.screen_bins).front();
    r.histogram = with_provenance(spec, histogram_csv(all, spec.apparatus));
    if (default_grouping(spec.kind) == GroupBy::apparatus) {
        for (const auto& h : aggregate(records, GroupBy::apparatus, spec.apparatus.screen_bins)) {
            r.group_histograms.emplace_back("histogram-" + h.key + ".csv",
                                            with_provenance(spec, histogram_csv(h, spec.apparatus)));
        }
    }
    r.metrics = scenario_metrics(spec, records);
    return r;
}

void add_simulate(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto args = std::make_shared<SimulateArgs>();
    auto* cmd = app.add_subcommand("simulate", "run an interference scenario from a JSON spec");
    cmd->add_option("spec", args->spec, "scenario spec (JSON)")->required();
    cmd->add_option("-o,--out", args->out_dir, std::string("output directory (default $") + kOutputEnv + " or .)");
    cmd->add_option("--replicas", args->replicas, "independent replicas; replica r is seeded mix(seed, r)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("-v,--verbose", args->verbose, "report written files");
    cmd->callback([args, &action, &out] {
        action = [args, &out] {
            const auto base_spec = ScenarioSpec::parse(read_file(args->spec));
            const fs::path dir = output_dir(args->out_dir);
            std::vector<ScenarioSpec> specs;
            for (std::size_t r = 0; r < args->replicas; ++r) {
                ScenarioSpec s = base_spec;
                if (args->replicas > 1) {
                    s.seed = mix_seed(base_spec.seed, r);
                }
                specs.push_back(s);
            }
            std::vector<ReplicaOutput> results(specs.size());
            const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
            for (std::size_t first = 0; first < specs.size(); first += workers) {
                std::vector<std::future<ReplicaOutput>> batch;
                for (std::size_t r = first; r < std::min(specs.size(), first + workers); ++r) {
                    batch.push_back(std::async(std::launch::async, run_replica, std::cref(specs[r])));
                }
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    results[first + i] = batch[i].get();
                }
            }
            ordered_json summary = ordered_json::array();
            for (std::size_t r = 0; r < results.size(); ++r) {
                const fs::path rdir = args->replicas > 1 ? dir / ("replica-" + std::to_string(r)) : dir;
                write_output(rdir / "trials.ndjson", results[r].ndjson, out, args->verbose);
                write_output(rdir / "histogram.csv", results[r].histogram, out, args->verbose);
                for (const auto& [name, csv] : results[r].group_histograms) {
                    write_output(rdir / name, csv, out, args->verbose);
                }
                write_output(rdir / "metrics.json", results[r].metrics.dump(2) + "\n", out, args->verbose);
                summary.push_back(results[r].metrics);
            }
            for (const auto& m : summary) {
                out << m["provenance"]["scenario"].get<std::string>() << " seed " << m["provenance"]["seed"]
                    << ": visibility " << std::fixed << std::setprecision(4) << m["visibility"].get<double>();
                if (m.contains("mean_pair_visibility")) {
                    out << ", mean pair visibility " << m["mean_pair_visibility"].get<double>();
                }
                out << ", poisson " << m["poisson"]["verdict"].get<std::string>() << '\n';
                out << std::defaultfloat;
            }
        };
    });
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
    std::string input;
    std::string output;
    std::string title = "fringe histogram";
};

std::vector<std::pair<double, double>> read_histogram_csv(const std::string& text) {
    std::vector<std::pair<double, double>> points;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("bin_center", 0) == 0) {
            continue;
        }
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("");
            points.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("histogram CSV line " + std::to_string(line_no) + " is malformed");
        }
    }
    if (points.empty()) {
        throw std::invalid_argument("histogram CSV has no rows");
    }
    return points;
}

std::string fringe_svg(const std::vector<std::pair<double, double>>& points, const std::string& title) {
    const double width = 640, height = 360, margin = 40;
    double peak = 0;
    for (const auto& p : points) {
        peak = std::max(peak, p.second);
    }
    if (peak <= 0) peak = 1;
    const double bar = (width - 2 * margin) / static_cast<double>(points.size());
    std::ostringstream svg;
    svg << std::fixed << std::setprecision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
        << "</text>\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double h = (height - 2 * margin) * points[i].second / peak;
        svg << "<rect x=\"" << margin + bar * static_cast<double>(i) << "\" y=\"" << height - margin - h
            << "\" width=\"" << bar << "\" height=\"" << h << "\" fill=\"#3465a4\"/>\n";
    }
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << height - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << std::setprecision(4) << std::scientific << points.front().first << " m</text>\n";
    svg << "<text x=\"" << width - margin - 80 << "\" y=\"" << height - 12
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << points.back().first << " m</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void add_report(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto args = std::make_shared<ReportArgs>();
    auto* cmd = app.add_subcommand("report", "SVG fringe chart of a histogram CSV or simulate output directory");
    cmd->add_option("input", args->input, "histogram CSV, or a directory holding histogram.csv")->required();
    cmd->add_option("-o,--output", args->output, "SVG path (default fringe.svg beside the input)");
    cmd->add_option("--title", args->title, "chart title")->capture_default_str();
    cmd->callback([args, &action, &out] {
        action = [args, &out] {
            fs::path csv = args->input;
            if (fs::is_directory(csv)) {
                csv /= "histogram.csv";
            }
            const auto points = read_histogram_csv(read_file(csv));
            std::vector<std::uint64_t> counts;
            for (const auto& p : points) {
                counts.push_back(static_cast<std::uint64_t>(std::llround(p.second)));
            }
            const fs::path svg = args->output.empty() ? csv.parent_path() / "fringe.svg" : fs::path(args->output);
            write_file_atomic(svg, fringe_svg(points, args->title));
            Histogram h{counts, 0, "all"};
            for (auto c : counts) h.total += c;
            out << "visibility " << std::fixed << std::setprecision(4) << visibility(h) << ", chart " << svg.string()
                << '\n';
        };
    });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"padicprob: p-adic frequency probability, complexity growth and interference-memory simulation",
                 "padicprob"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(PADICPROB_VERSION));
    std::function<void()> action;
    add_padic(app, action, out);
    add_realize(app, action, out);
    add_analyze(app, action, out);
    add_simulate(app, action, out);
    add_report(app, action, out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitCode::ok : ExitCode::usage;
    }
    try {
        if (action) {
            action();
        }
    } catch (const Failure& f) {
        err << "padicprob: " << f.message << '\n';
        return ExitCode::failure;
    } catch (const std::exception& e) {
        err << "padicprob: " << e.what() << '\n';
        return ExitCode::usage;
    }
    return ExitCode::ok;
}

}  // namespace padicprob::cli
