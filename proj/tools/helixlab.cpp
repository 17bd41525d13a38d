// helixlab: analyze and synthesize curves in Minkowski 3-space.
//
// Subcommands: classify, frenet, sigma, slant, synth, oracle.
// Exit codes: 0 success, 1 analysis error, 2 usage/parse error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "helixlab/curve.hpp"
#include "helixlab/errors.hpp"
#include "helixlab/frenet.hpp"
#include "helixlab/numfmt.hpp"
#include "helixlab/slant.hpp"
#include "helixlab/synth.hpp"

namespace fs = std::filesystem;
using namespace helixlab;

namespace {

constexpr int kExitAnalysis = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IOError("write to '" + path + "' failed");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
}

void require_input_file(const std::string& path) {
    if (!path.empty() && !fs::exists(path))
        throw UsageError("input file does not exist: " + path);
}

double resolve_tol(double flag_tol, bool flag_given) {
    if (flag_given) {
        if (!(flag_tol > 0.0)) throw UsageError("--tol must be positive");
        return flag_tol;
    }
    if (const char* env = std::getenv("HELIXLAB_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || !(v > 0.0))
            throw UsageError("HELIXLAB_TOL must be a positive number");
        return v;
    }
    return 0.0;  // analyze() picks the source-appropriate default
}

CurveClass parse_class_flag(const std::string& name) {
    if (auto c = curve_class_from_string(name)) return *c;
    std::string msg = "invalid class '" + name + "'; valid classes:";
    for (const std::string& n : curve_class_names()) msg += " " + n;
    throw UsageError(msg);
}

FrenetApparatus apparatus_from_inputs(const std::string& curve_path,
                                      const std::string& csv_path) {
    if (curve_path.empty() == csv_path.empty())
        throw UsageError("exactly one of --curve or --csv is required");
    if (!curve_path.empty()) {
        require_input_file(curve_path);
        return frenet_apparatus(load_curve_file(curve_path));
    }
    require_input_file(csv_path);
    return frenet_from_samples(load_curve_csv(csv_path));
}

std::string sigma_csv(const std::vector<SigmaProfile>& profiles) {
    std::string out = "s,branch,sigma\n";
    for (const SigmaProfile& p : profiles)
        for (std::size_t i = 0; i < p.s.size(); ++i)
            if (p.valid[i])
                out += format_double(p.s[i]) + "," + to_string(p.branch) + "," +
                       format_double(p.sigma[i]) + "\n";
    return out;
}

std::string n_dot_u_csv(const FrenetApparatus& app, const SlantReport& rep) {
    const Vec3 U = rep.axis ? rep.axis->U : rep.oracle.U;
    std::string out = "s,value\n";
    for (const FrameSample& f : app.samples)
        out += format_double(f.s) + "," + format_double(minkowski_inner(f.N, U)) + "\n";
    return out;
}

struct SlantOptions {
    double tol = 0.0;
    bool force_oracle = false;
    bool emit_profiles = false;
    std::string profile_dir;
    std::string expect_class;
};

int run_slant_one(const FrenetApparatus& app, const SlantOptions& opt,
                  const std::string& out_path) {
    if (!opt.expect_class.empty()) {
        const CurveClass expect = parse_class_flag(opt.expect_class);
        if (expect != app.cls)
            throw Error(std::string("curve classified as ") + to_string(app.cls) +
                        ", not the requested " + to_string(expect));
    }
    const SlantReport rep = analyze(app, opt.tol);
    emit(report_to_json(rep), out_path);
    if (opt.emit_profiles) {
        const fs::path dir = opt.profile_dir.empty() ? fs::path(".") : fs::path(opt.profile_dir);
        write_text((dir / "sigma.csv").string(), sigma_csv(rep.profiles));
        write_text((dir / "n_dot_u.csv").string(), n_dot_u_csv(app, rep));
    }
    if (opt.force_oracle && rep.oracle_disagreement) {
        std::cerr << "oracle disagreement: analytic verdict " << to_string(rep.verdict)
                  << ", oracle n_variance " << format_double(rep.oracle.n_variance)
                  << " against threshold " << format_double(rep.tol * rep.tol) << "\n";
        return kExitAnalysis;
    }
    return 0;
}

int run_slant_batch(const std::string& dir, const SlantOptions& opt, int jobs) {
    if (!fs::is_directory(dir)) throw UsageError("--batch expects a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".curve" || ext == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("no .curve or .csv files in " + dir);

    struct Result {
        std::string name;
        std::string summary;
        bool failed = false;
    };
    std::vector<Result> results(files.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            Result& r = results[i];
            r.name = files[i].filename().string();
            try {
                FrenetApparatus app =
                    files[i].extension() == ".curve"
                        ? frenet_apparatus(load_curve_file(files[i].string()))
                        : frenet_from_samples(load_curve_csv(files[i].string()));
                const SlantReport rep = analyze(app, opt.tol);
                write_text(files[i].string() + ".report.json", report_to_json(rep));
                r.summary = std::string(to_string(rep.verdict)) + " (" +
                            to_string(rep.cls) + ")";
                if (opt.force_oracle && rep.oracle_disagreement) {
                    r.summary += " [oracle disagreement]";
                    r.failed = true;
                }
            } catch (const std::exception& e) {
                r.summary = std::string("error: ") + e.what();
                r.failed = true;
            }
        }
    };

    if (jobs < 1) jobs = 1;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    // results are already ordered by the sorted file list
    bool any_failed = false;
    std::string out;
    for (const Result& r : results) {
        out += r.name + ": " + r.summary + "\n";
        any_failed = any_failed || r.failed;
    }
    std::cout << out;
    return any_failed ? kExitAnalysis : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"helixlab: slant-helix analysis of curves in Minkowski 3-space"};
    app.require_subcommand(1);

    std::string curve_path, csv_path, out_path, batch_dir;
    int grid = 0;
    double tol = 0.0;
    SlantOptions slant_opt;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());

    auto* classify_cmd = app.add_subcommand("classify", "causal class of a curve");
    classify_cmd->add_option("--curve", curve_path, "curve document");
    classify_cmd->add_option("--csv", csv_path, "sampled curve CSV");
    classify_cmd->add_option("--grid", grid, "classification grid points");
    classify_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* frenet_cmd = app.add_subcommand("frenet", "frames, curvature and torsion");
    frenet_cmd->add_option("--curve", curve_path, "curve document");
    frenet_cmd->add_option("--csv", csv_path, "sampled curve CSV");
    frenet_cmd->add_option("--out", out_path, "apparatus CSV path (default stdout)");

    auto* sigma_cmd = app.add_subcommand("sigma", "characterization profiles");
    sigma_cmd->add_option("--curve", curve_path, "curve document");
    sigma_cmd->add_option("--csv", csv_path, "sampled curve CSV");
    sigma_cmd->add_option("--out", out_path, "profile CSV path (default stdout)");

    auto* slant_cmd = app.add_subcommand("slant", "slant-helix decision and report");
    slant_cmd->add_option("--curve", curve_path, "curve document");
    slant_cmd->add_option("--csv", csv_path, "sampled curve CSV");
    slant_cmd->add_option("--batch", batch_dir, "directory of curves to process");
    auto* tol_opt = slant_cmd->add_option("--tol", tol, "constancy tolerance");
    slant_cmd->add_flag("--oracle", slant_opt.force_oracle,
                        "exit 1 when the brute-force check disagrees");
    slant_cmd->add_flag("--emit-profiles", slant_opt.emit_profiles,
                        "write sigma.csv and n_dot_u.csv");
    slant_cmd->add_option("--profile-dir", slant_opt.profile_dir,
                          "directory for emitted profiles (default .)");
    slant_cmd->add_option("--class", slant_opt.expect_class,
                          "require this curve class");
    slant_cmd->add_option("--jobs", jobs, "worker count for --batch");
    slant_cmd->add_option("--out", out_path, "report path (default stdout)");

    auto* synth_cmd = app.add_subcommand("synth", "integrate a frame system");
    std::string cls_name, kappa_text = "1", tau_text, frames_path;
    std::vector<double> range;
    double step = 1e-3;
    synth_cmd->add_option("--class", cls_name, "curve class")->required();
    synth_cmd->add_option("--kappa", kappa_text, "curvature: expression in s or .fn file");
    synth_cmd->add_option("--tau", tau_text, "torsion: expression in s or .fn file")
        ->required();
    synth_cmd->add_option("--range", range, "s range: two numbers")->expected(2);
    synth_cmd->add_option("--step", step, "integration step");
    synth_cmd->add_option("--out", out_path, "curve CSV path (default stdout)");
    synth_cmd->add_option("--frames", frames_path, "also write the frame CSV here");

    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force axis search only");
    oracle_cmd->add_option("--curve", curve_path, "curve document");
    oracle_cmd->add_option("--csv", csv_path, "sampled curve CSV");
    auto* otol_opt = oracle_cmd->add_option("--tol", tol, "constancy tolerance");
    oracle_cmd->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (classify_cmd->parsed()) {
            if (curve_path.empty() == csv_path.empty())
                throw UsageError("exactly one of --curve or --csv is required");
            CurveClass cls;
            if (!curve_path.empty()) {
                require_input_file(curve_path);
                const CurveSpec spec = load_curve_file(curve_path);
                cls = classify_curve(spec, grid > 0 ? grid : spec.samples);
            } else {
                require_input_file(csv_path);
                cls = frenet_from_samples(load_curve_csv(csv_path)).cls;
            }
            emit(std::string("{\"class\": \"") + to_string(cls) + "\"}\n", out_path);
            return 0;
        }

        if (frenet_cmd->parsed()) {
            const FrenetApparatus a = apparatus_from_inputs(curve_path, csv_path);
            std::ostringstream ss;
            write_apparatus_csv(a, ss);
            emit(ss.str(), out_path);
            return 0;
        }

        if (sigma_cmd->parsed()) {
            const FrenetApparatus a = apparatus_from_inputs(curve_path, csv_path);
            emit(sigma_csv(sigma_profile(a)), out_path);
            return 0;
        }

        if (slant_cmd->parsed()) {
            slant_opt.tol = resolve_tol(tol, tol_opt->count() > 0);
            if (!slant_opt.expect_class.empty()) parse_class_flag(slant_opt.expect_class);
            if (!batch_dir.empty()) {
                if (!curve_path.empty() || !csv_path.empty())
                    throw UsageError("--batch cannot be combined with --curve/--csv");
                return run_slant_batch(batch_dir, slant_opt, jobs);
            }
            const FrenetApparatus a = apparatus_from_inputs(curve_path, csv_path);
            return run_slant_one(a, slant_opt, out_path);
        }

        if (synth_cmd->parsed()) {
            SynthRequest req;
            req.cls = parse_class_flag(cls_name);
            // --kappa / --tau take an inline expression in s, or a `.fn`
            // document; a tau document's domain doubles as the default range
            std::optional<Interval> fn_domain;
            auto scalar_arg = [&](const std::string& text) {
                if (text.size() > 3 && text.substr(text.size() - 3) == ".fn") {
                    require_input_file(text);
                    const ScalarFnSpec fn = load_fn_file(text);
                    fn_domain = fn.domain;
                    return ScalarField::from_expr(fn.f);
                }
                return ScalarField::from_expr(parse_expr(text, "s"));
            };
            req.kappa = scalar_arg(kappa_text);
            req.tau = scalar_arg(tau_text);
            if (range.size() == 2) {
                if (!(range[0] < range[1]))
                    throw UsageError("--range needs two increasing numbers");
                req.s_range = {range[0], range[1]};
            } else if (fn_domain) {
                req.s_range = *fn_domain;
            } else {
                throw UsageError("--range is required unless a .fn file provides a domain");
            }
            req.step = step;
            const SynthResult r = synth_curve(req);
            std::ostringstream ss;
            write_curve_csv(r, ss);
            emit(ss.str(), out_path);
            if (!frames_path.empty()) {
                std::ostringstream fs_;
                write_apparatus_csv(r.apparatus, fs_);
                write_text(frames_path, fs_.str());
            }
            return 0;
        }

        if (oracle_cmd->parsed()) {
            const double tol_r = resolve_tol(tol, otol_opt->count() > 0);
            const FrenetApparatus a = apparatus_from_inputs(curve_path, csv_path);
            const AxisCandidate ax = brute_force_axis(a);
            const double used_tol =
                tol_r > 0.0 ? tol_r
                            : (a.source == ApparatusSource::Sampled ? 1e-4 : 1e-6);
            std::string out = "{\n  \"class\": \"" + std::string(to_string(a.cls)) +
                              "\",\n  \"oracle\": {\"U\": [" + format_double(ax.U.x) + ", " +
                              format_double(ax.U.y) + ", " + format_double(ax.U.z) +
                              "], \"c\": " + format_double(ax.c_value) +
                              ", \"n_variance\": " + format_double(ax.n_variance) +
                              ", \"slant\": ";
            out += ax.n_variance <= used_tol * used_tol ? "true" : "false";
            out += "}\n}\n";
            emit(out, out_path);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnknownIdentifier& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const MissingField& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return 0;
}
