// frostlab command-line front end. Every subcommand reads the plain-text
// formats from io.hpp / uniformization.hpp, writes key=value reports and
// CSVs, and follows one exit contract: 0 on success, 1 when a precondition
// or contract is violated, 2 on usage errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frostlab/duality.hpp"
#include "frostlab/experiment.hpp"
#include "frostlab/generators.hpp"
#include "frostlab/geometry.hpp"
#include "frostlab/incidence.hpp"
#include "frostlab/io.hpp"
#include "frostlab/radial.hpp"
#include "frostlab/regularity.hpp"
#include "frostlab/uniformization.hpp"

namespace {

using namespace frostlab;

// "6..12" -> {6,...,12}. Thrown errors surface as usage errors (exit 2)
// because option callbacks run inside CLI11's parse.
std::vector<int> parse_ladder(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos)
        throw CLI::ValidationError("--ladder", "expected m1..m2, got '" + text + "'");
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    if (lo < 0 || hi < lo)
        throw CLI::ValidationError("--ladder", "need 0 <= m1 <= m2 in '" + text + "'");
    std::vector<int> lad;
    for (int m = lo; m <= hi; ++m) lad.push_back(m);
    return lad;
}

void emit(const KeyValueBlock& block, const std::string& out) {
    if (out.empty())
        std::cout << block.to_string();
    else
        block.save(out);
}

std::string under(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

KeyValueBlock regularity_block(const RegularityReport& rep) {
    KeyValueBlock b;
    b.add("kind", rep.kind);
    b.add("s", rep.s);
    b.add("delta_exp", rep.delta_exp);
    b.add("n_points", static_cast<std::uint64_t>(rep.n_points));
    b.add("covering", static_cast<std::uint64_t>(rep.covering));
    b.add("best_C", rep.best_C);
    b.add("witness_center", fmt_point(rep.witness_center));
    b.add("witness_radius_exp", rep.witness_radius_exp);
    return b;
}

struct CommonOpts {
    std::string out;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = auto (FROSTLAB_THREADS, then hardware)
};

void cmd_verify_set(const std::string& file, double s, const std::string& kind,
                    const CommonOpts& opt) {
    PointSet P = load_points(file);
    RegularityReport rep =
        kind == "katz-tao" ? verify_katz_tao(P, s) : verify_delta_set(P, s);
    emit(regularity_block(rep), opt.out);
}

void cmd_decompose(const std::string& file, double t, double C, double eps,
                   const CommonOpts& opt) {
    PointSet P = load_points(file);
    DecompositionReport rep = katz_tao_decompose(P, t, C, eps);
    KeyValueBlock b;
    b.add("n_parts", static_cast<std::uint64_t>(rep.N));
    b.add("n_points", static_cast<std::uint64_t>(P.size()));
    b.add("t", rep.t);
    b.add("C", rep.C);
    b.add("eps", rep.eps);
    b.add("H", rep.H);
    b.add("bound_rhs", rep.bound_rhs);
    b.add("bound_ok", rep.bound_ok);
    b.add("premise_measured_C", rep.premise_measured_C);
    b.add("premise_ok", rep.premise_ok);
    double worst = 0.0;
    for (double c : rep.part_best_C) worst = std::max(worst, c);
    b.add("max_part_best_C", worst);
    if (opt.out.empty()) {
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    CsvWriter parts({"part_id", "point_index"});
    for (std::size_t j = 0; j < rep.parts.size(); ++j)
        for (int i : rep.parts[j])
            parts.row({std::to_string(j), std::to_string(i)});
    parts.save(under(opt.out, "parts.csv"));
    b.save(under(opt.out, "report.txt"));
}

void cmd_uniformize(const std::string& file, double eta, const CommonOpts& opt) {
    DyadicMeasure mu = load_measure(file);
    UniformizeResult res = uniformize(mu, eta);
    KeyValueBlock b;
    b.add("dim", mu.dim());
    b.add("block_size", mu.block_size());
    b.add("blocks", mu.blocks());
    b.add("eta", eta);
    b.add("mass_in", mu.total_mass());
    b.add("mass_out", res.measure.total_mass());
    b.add("n_cells_out", static_cast<std::uint64_t>(res.measure.cells().size()));
    b.add("k_lo", res.profile.k_lo);
    if (opt.out.empty()) {
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    save_measure(under(opt.out, "measure.txt"), res.measure);
    save_profile(under(opt.out, "profile.txt"), res.profile);
    CsvWriter levels({"k", "phi", "retained", "light_discarded", "class_discarded"});
    for (const auto& lv : res.levels)
        levels.row({std::to_string(lv.k), fmt_double(lv.phi), fmt_double(lv.retained),
                    fmt_double(lv.light_discarded), fmt_double(lv.class_discarded)});
    levels.save(under(opt.out, "levels.csv"));
    b.save(under(opt.out, "report.txt"));
}

void cmd_stable_scale(const std::string& file, double eps, const CommonOpts& opt) {
    UniformityProfile prof = load_profile(file);
    StableScaleResult res = stable_scale_search(prof, eps);
    KeyValueBlock b;
    b.add("delta_exp", res.Delta.exponent);
    b.add("sigma", res.Sigma);
    b.add("k_index", res.k_index);
    b.add("steps", res.steps);
    emit(b, opt.out);
}

void cmd_incidence(const std::string& pfile, const std::string& tfile,
                   const std::string& method, std::optional<double> s,
                   std::optional<double> t, double eps, const CommonOpts& opt) {
    PointSet P = load_points(pfile);
    TubeSet T{load_tubes(tfile)};
    IncidenceReport rep;
    if (s && t) {
        rep = check_fu_ren(P, T, *s, *t, eps);
    } else {
        rep = count_incidences(P, T,
                               method == "brute" ? CountMethod::brute : CountMethod::grid);
    }
    emit(rep.to_block(), opt.out);
}

void cmd_buckets(const std::string& afile, const std::string& ffile, double eps,
                 double tau, double s, const CommonOpts& opt) {
    std::vector<AnchoredTubes> fams = load_anchored_tubes(afile);
    PointSet F = load_points(ffile);
    MultiplicityBuckets mb = multiplicity_buckets(fams, F, eps, tau, s);
    KeyValueBlock b;
    b.add("L", mb.L);
    b.add("eps", mb.eps);
    b.add("tau", mb.tau);
    b.add("n_points", static_cast<std::uint64_t>(F.size()));
    b.add("n_bad", static_cast<std::uint64_t>(mb.f_bad.size()));
    b.add("bad_fraction",
          F.size() ? static_cast<double>(mb.f_bad.size()) / F.size() : 0.0);
    b.add("range_note", mb.range_note);
    if (opt.out.empty()) {
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    CsvWriter csv({"j", "n_tubes", "covered", "kept", "mass_ok", "high_count",
                   "tube_best_C"});
    for (const auto& bk : mb.buckets)
        csv.row({std::to_string(bk.j), std::to_string(bk.tubes.tubes.size()),
                 std::to_string(bk.covered.size()), bk.kept ? "1" : "0",
                 bk.mass_ok ? "1" : "0", std::to_string(bk.high_count),
                 fmt_double(bk.tube_regularity.best_C)});
    csv.save(under(opt.out, "buckets.csv"));
    b.save(under(opt.out, "report.txt"));
}

void cmd_dualize(const std::string& file, bool invert, std::optional<double> width,
                 std::optional<int> scale_exp, const CommonOpts& opt) {
    if (opt.out.empty()) throw std::invalid_argument("dualize requires --out");
    if (invert) {
        std::vector<Tube> tubes = load_tubes(file);
        std::vector<Point2> pts;
        double wmin = 1.0;
        for (const Tube& tb : tubes) {
            pts.push_back(dualize_line(from_angle_form(tb.axis)));
            wmin = std::min(wmin, tb.width);
        }
        int e = scale_exp ? *scale_exp
                          : std::max(0, static_cast<int>(std::lround(-std::log2(wmin))));
        save_points(opt.out, PointSet::unchecked(std::move(pts), Scale(e)));
        return;
    }
    PointSet P = load_points(file);
    double w = width ? *width : std::exp2(-P.scale().exponent);
    std::vector<Tube> tubes;
    for (const Point2& p : P.points())
        tubes.emplace_back(to_angle_form(dualize_point(p)), w);
    save_tubes(opt.out, tubes);
}

void cmd_radial_scan(const std::string& kfile, const std::string& vfile, double sigma,
                     const std::vector<int>& ladder, double min_dist,
                     const CommonOpts& opt) {
    PointSet K = load_points(kfile);
    PointSet V = load_points(vfile);
    ScanReport scan = exceptional_scan(K, V, sigma, ladder, min_dist, opt.threads);
    KeyValueBlock b;
    b.add("sigma", scan.sigma);
    b.add("n_viewpoints", static_cast<std::uint64_t>(scan.n_viewpoints));
    b.add("t_emp", scan.t_emp);
    b.add("t_emp_residual", scan.t_emp_residual);
    b.add("exc_slope", scan.exc_slope);
    b.add("exc_slope_defined", scan.exc_slope_defined);
    b.add("exc_residual", scan.exc_residual);
    b.add("bound", scan.bound);
    if (opt.out.empty()) {
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    write_text_file(under(opt.out, "per_viewpoint.csv"), scan.per_viewpoint_csv);
    write_text_file(under(opt.out, "summary.csv"), scan.summary_csv);
    b.save(under(opt.out, "report.txt"));
}

void cmd_furstenberg(double s, double t, int scale_exp, const CommonOpts& opt) {
    FurstenbergConfig fc = furstenberg_config(s, t, Scale(scale_exp), opt.seed);
    KeyValueBlock b;
    b.add("s", s);
    b.add("t", t);
    b.add("gamma", fc.gamma);
    b.add("n_tubes", static_cast<std::uint64_t>(fc.tubes.tubes.size()));
    b.add("n_union", static_cast<std::uint64_t>(fc.union_set.size()));
    if (opt.out.empty()) {
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    save_tubes(under(opt.out, "tubes.txt"), fc.tubes.tubes);
    save_points(under(opt.out, "union.txt"), fc.union_set);
    b.save(under(opt.out, "report.txt"));
}

void cmd_gen(const GeneratorSpec& spec, int dim, int block_size, int blocks,
             const CommonOpts& opt) {
    if (opt.out.empty()) throw std::invalid_argument("gen requires --out");
    if (spec.kind == "measure") {
        save_measure(opt.out, seeded_measure(dim, block_size, blocks, spec.seed));
        return;
    }
    save_points(opt.out, generate(spec));
}

void cmd_dim(const std::string& file, const std::vector<int>& ladder,
             const CommonOpts& opt) {
    PointSet P = load_points(file);
    std::map<int, std::uint64_t> counts;
    CsvWriter csv({"scale_exp", "covering"});
    for (int m : ladder) {
        counts[m] = covering_number(P, Scale(m));
        csv.row({std::to_string(m), std::to_string(counts[m])});
    }
    DimensionFit fit = estimate_dimension(counts);
    KeyValueBlock b;
    b.add("slope", fit.slope);
    b.add("residual", fit.residual);
    b.add("n_scales", static_cast<std::uint64_t>(fit.n_scales));
    if (opt.out.empty()) {
        std::cout << csv.text();
        emit(b, "");
        return;
    }
    std::filesystem::create_directories(opt.out);
    csv.save(under(opt.out, "covering.csv"));
    b.save(under(opt.out, "report.txt"));
}

void cmd_experiment(const std::string& config, std::optional<std::uint64_t> seed,
                    const CommonOpts& opt) {
    if (opt.out.empty()) throw std::invalid_argument("experiment requires --out");
    ExperimentConfig cfg = ExperimentConfig::load(config);
    for (const std::string& p : run_experiment(cfg, opt.out, seed, opt.threads))
        std::cout << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frostlab: delta-discretized fractal geometry toolkit"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string file, file2, kind, method = "grid", ladder_text, config;
    double s = 1.0, t = 1.0, C = 1.0, eps = 0.1, eta = 0.25, tau = 1.0;
    double sigma = 0.5, min_dist = 0.05, s_report = 1.0;
    std::optional<double> opt_s, opt_t, opt_width;
    std::optional<int> opt_scale_exp;
    std::optional<std::uint64_t> opt_seed;
    bool invert = false;
    GeneratorSpec spec;
    int dim = 2, block_size = 0, blocks = 1;
    std::string digits_text = "0,1,2";

    auto add_common = [&](CLI::App* sub, bool threads = false) {
        sub->add_option("--out", opt.out, "Output file or directory");
        if (threads)
            sub->add_option("--threads", opt.threads,
                            "Worker count (0 = FROSTLAB_THREADS or hardware)");
    };

    auto* verify = app.add_subcommand("verify-set", "Measure regularity constants");
    verify->add_option("points", file, "Point-set file")->required();
    verify->add_option("--s", s, "Exponent")->required();
    verify->add_option("--kind", kind, "ball (default) or katz-tao")
        ->check(CLI::IsMember({"ball", "katz-tao"}))
        ->default_val("ball");
    add_common(verify);
    verify->callback([&] { cmd_verify_set(file, s, kind, opt); });

    auto* dec = app.add_subcommand("decompose", "Partition into Katz-Tao pieces");
    dec->add_option("points", file, "Point-set file")->required();
    dec->add_option("--t", t, "Exponent")->required();
    dec->add_option("--C", C, "Regularity constant of the input");
    dec->add_option("--eps", eps, "Slack exponent");
    add_common(dec);
    dec->callback([&] { cmd_decompose(file, t, C, eps, opt); });

    auto* uni = app.add_subcommand("uniformize", "Restrict a measure to uniform form");
    uni->add_option("measure", file, "Measure file")->required();
    uni->add_option("--eta", eta, "Exponent-class width")->required();
    add_common(uni);
    uni->callback([&] { cmd_uniformize(file, eta, opt); });

    auto* stable = app.add_subcommand("stable-scale", "Find a stable scale in a profile");
    stable->add_option("profile", file, "Profile file")->required();
    stable->add_option("--eps", eps, "Descent tolerance")->required();
    add_common(stable);
    stable->callback([&] { cmd_stable_scale(file, eps, opt); });

    auto* inc = app.add_subcommand("incidence", "Count point-tube incidences");
    inc->add_option("points", file, "Point-set file")->required();
    inc->add_option("tubes", file2, "Tube file")->required();
    inc->add_option("--method", method, "grid (default) or brute")
        ->check(CLI::IsMember({"grid", "brute"}));
    inc->add_option("--s", opt_s, "Point-set exponent (with --t: run the bound check)");
    inc->add_option("--t", opt_t, "Tube-family exponent");
    inc->add_option("--eps", eps, "Slack exponent for the bound check");
    add_common(inc);
    inc->callback([&] { cmd_incidence(file, file2, method, opt_s, opt_t, eps, opt); });

    auto* buck = app.add_subcommand("buckets", "Dyadic multiplicity buckets");
    buck->add_option("anchored", file, "Anchored-tube file")->required();
    buck->add_option("points", file2, "Point-set file (F)")->required();
    buck->add_option("--eps", eps, "Keep threshold exponent")->required();
    buck->add_option("--tau", tau, "High-multiplicity exponent")->required();
    buck->add_option("--s", s_report, "Exponent for the bucket regularity reports");
    add_common(buck);
    buck->callback([&] { cmd_buckets(file, file2, eps, tau, s_report, opt); });

    auto* dual = app.add_subcommand("dualize", "Map points to tubes (or back)");
    dual->add_option("input", file, "Point-set file (tube file with --invert)")
        ->required();
    dual->add_flag("--invert", invert, "Map tube axes back to points");
    dual->add_option("--width", opt_width, "Tube width (default: input scale)");
    dual->add_option("--scale-exp", opt_scale_exp,
                     "Scale exponent for recovered points");
    add_common(dual);
    dual->callback([&] { cmd_dualize(file, invert, opt_width, opt_scale_exp, opt); });

    auto* scan = app.add_subcommand("radial-scan", "Exceptional-viewpoint scan");
    scan->add_option("set", file, "Point-set file (K)")->required();
    scan->add_option("viewpoints", file2, "Viewpoint file")->required();
    scan->add_option("--sigma", sigma, "Direction-count exponent")->required();
    scan->add_option("--ladder", ladder_text, "Scale range m1..m2")->required();
    scan->add_option("--min-dist", min_dist, "Separation floor")->required();
    add_common(scan, true);
    scan->callback(
        [&] { cmd_radial_scan(file, file2, sigma, parse_ladder(ladder_text), min_dist, opt); });

    auto* fur = app.add_subcommand("furstenberg", "Seeded tube family and its union");
    fur->add_option("--s", s, "Per-tube exponent")->required();
    fur->add_option("--t", t, "Tube-family exponent")->required();
    fur->add_option("--scale-exp", spec.scale_exp, "Scale exponent")->required();
    fur->add_option("--seed", opt.seed, "Seed");
    add_common(fur);
    fur->callback([&] { cmd_furstenberg(s, t, spec.scale_exp, opt); });

    auto* gen = app.add_subcommand("gen", "Generate point sets and measures");
    gen->add_option("--kind", spec.kind,
                    "cantor_product | on_line | random_delta | furstenberg | grid | measure")
        ->required();
    gen->add_option("--base", spec.pattern.base, "Digit base for cantor_product");
    gen->add_option("--digits", digits_text, "Kept digits, comma-separated");
    gen->add_option("--depth", spec.depth, "Construction depth");
    gen->add_option("--s", spec.s, "Exponent s");
    gen->add_option("--t", spec.t, "Exponent t");
    gen->add_option("--scale-exp", spec.scale_exp, "Scale exponent");
    gen->add_option("--seed", spec.seed, "Seed");
    gen->add_option("--line-theta", spec.line_theta, "Carrier line angle");
    gen->add_option("--line-offset", spec.line_offset, "Carrier line offset");
    gen->add_option("--dim", dim, "Measure dimension (kind=measure)");
    gen->add_option("--block-size", block_size, "Measure block size T (kind=measure)");
    gen->add_option("--blocks", blocks, "Measure block count m (kind=measure)");
    add_common(gen);
    gen->callback([&] {
        spec.pattern.digits.clear();
        std::size_t pos = 0;
        while (pos < digits_text.size()) {
            std::size_t comma = digits_text.find(',', pos);
            if (comma == std::string::npos) comma = digits_text.size();
            spec.pattern.digits.push_back(std::stoi(digits_text.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        cmd_gen(spec, dim, block_size, blocks, opt);
    });

    auto* dimc = app.add_subcommand("dim", "Box-counting dimension estimate");
    dimc->add_option("points", file, "Point-set file")->required();
    dimc->add_option("--ladder", ladder_text, "Scale range m1..m2")->required();
    add_common(dimc);
    dimc->callback([&] { cmd_dim(file, parse_ladder(ladder_text), opt); });

    auto* exp = app.add_subcommand("experiment", "Run a canned suite from a config");
    exp->add_option("--config", config, "Config file")->required();
    exp->add_option("--seed", opt_seed, "Seed override");
    add_common(exp, true);
    exp->callback([&] { cmd_experiment(config, opt_seed, opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
