// Python bindings for the core operations: point sets and their regularity
// constants, Katz-Tao decompositions, dyadic measures and uniformization,
// point-line duality, incidence counting, radial scans, the seeded
// generators, and the experiment runner. Reports cross the boundary as plain
// dicts; the stateful types (PointSet, Line, Tube, DyadicMeasure,
// UniformityProfile, ArcSet) are thin classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "frostlab/duality.hpp"
#include "frostlab/experiment.hpp"
#include "frostlab/generators.hpp"
#include "frostlab/geometry.hpp"
#include "frostlab/incidence.hpp"
#include "frostlab/io.hpp"
#include "frostlab/radial.hpp"
#include "frostlab/regularity.hpp"
#include "frostlab/uniformization.hpp"

namespace py = pybind11;
using namespace frostlab;

namespace {

PointSet make_point_set(const std::vector<std::pair<double, double>>& pts,
                        int scale_exp, bool checked) {
    std::vector<Point2> v;
    v.reserve(pts.size());
    for (const auto& [x, y] : pts) v.push_back({x, y});
    return checked ? PointSet(std::move(v), Scale(scale_exp))
                   : PointSet::unchecked(std::move(v), Scale(scale_exp));
}

std::vector<std::pair<double, double>> points_out(const PointSet& ps) {
    std::vector<std::pair<double, double>> out;
    out.reserve(ps.size());
    for (const auto& p : ps.points()) out.emplace_back(p.x, p.y);
    return out;
}

py::dict regularity_dict(const RegularityReport& r) {
    py::dict d;
    d["kind"] = r.kind;
    d["s"] = r.s;
    d["delta_exp"] = r.delta_exp;
    d["n_points"] = r.n_points;
    d["covering"] = r.covering;
    d["best_C"] = r.best_C;
    d["witness_center"] = std::make_pair(r.witness_center.x, r.witness_center.y);
    d["witness_radius_exp"] = r.witness_radius_exp;
    return d;
}

py::dict incidence_dict(const IncidenceReport& r) {
    py::dict d;
    d["count"] = r.count;
    d["method"] = r.method == CountMethod::grid ? "grid" : "brute";
    d["s"] = r.s;
    d["t"] = r.t;
    d["eps"] = r.eps;
    d["kappa"] = r.kappa;
    d["bound_rhs"] = r.bound_rhs;
    d["satisfied"] = r.satisfied;
    d["vacuous"] = r.vacuous;
    d["premise_verified"] = r.premise_verified;
    d["premise_points_ok"] = r.premise_P_ok;
    d["premise_tubes_ok"] = r.premise_T_ok;
    d["measured_C_points"] = r.measured_C_points;
    d["measured_C_tubes"] = r.measured_C_tubes;
    return d;
}

TubeSet tube_set(const std::vector<Tube>& tubes) {
    TubeSet t;
    t.tubes = tubes;
    return t;
}

}  // namespace

PYBIND11_MODULE(_frostlab, mod) {
    mod.doc() =
        "Dyadic-scale planar geometry laboratory: separated point sets, "
        "regularity constants, Katz-Tao decompositions, block-uniform "
        "measures, point-line duality, incidence counts, radial projection "
        "scans, seeded generators, and canned experiment suites.";

    py::class_<Point2>(mod, "Point2")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def(py::init([](const std::pair<double, double>& p) {
                 return Point2{p.first, p.second};
             }),
             py::arg("xy"))
        .def_readwrite("x", &Point2::x)
        .def_readwrite("y", &Point2::y)
        .def("__repr__", [](const Point2& p) {
            return "Point2(" + fmt_double(p.x) + ", " + fmt_double(p.y) + ")";
        });
    py::implicitly_convertible<py::tuple, Point2>();

    py::class_<Line>(mod, "Line")
        .def(py::init<double, double>(), py::arg("theta"), py::arg("offset"))
        .def_readonly("theta", &Line::theta)
        .def_readonly("offset", &Line::offset)
        .def("signed_dist", &Line::signed_dist, py::arg("p"))
        .def("__repr__", [](const Line& l) {
            return "Line(" + fmt_double(l.theta) + ", " + fmt_double(l.offset) + ")";
        });

    py::class_<Tube>(mod, "Tube")
        .def(py::init<Line, double>(), py::arg("axis"), py::arg("width"))
        .def_readonly("axis", &Tube::axis)
        .def_readonly("width", &Tube::width)
        .def("contains",
             [](const Tube& t, const Point2& p) { return tube_contains(t, p); },
             py::arg("p"));

    py::class_<PointSet>(mod, "PointSet")
        .def(py::init(&make_point_set), py::arg("points"), py::arg("scale_exp"),
             py::arg("checked") = true,
             "Point set tagged with scale 2^-scale_exp; checked=True enforces "
             "the closed delta-separation condition at construction.")
        .def_property_readonly("scale_exp",
                               [](const PointSet& p) { return p.scale().exponent; })
        .def_property_readonly("delta", &PointSet::delta)
        .def_property_readonly("separation_checked", &PointSet::separation_checked)
        .def("points", &points_out)
        .def("__len__", &PointSet::size);

    py::class_<ArcSet>(mod, "ArcSet")
        .def_readonly("depth", &ArcSet::depth)
        .def_readonly("arcs", &ArcSet::arcs)
        .def("covering", &ArcSet::covering, py::arg("depth"))
        .def("__len__", &ArcSet::size);

    py::class_<DyadicMeasure>(mod, "DyadicMeasure")
        .def(py::init([](int dim, int block_size, int blocks,
                         const std::vector<std::pair<std::string, double>>& cells) {
                 std::vector<MeasureCell> mc;
                 mc.reserve(cells.size());
                 for (const auto& [path, mass] : cells) mc.push_back({path, mass});
                 return DyadicMeasure(dim, block_size, blocks, std::move(mc));
             }),
             py::arg("dim"), py::arg("block_size"), py::arg("blocks"),
             py::arg("cells"))
        .def_property_readonly("dim", &DyadicMeasure::dim)
        .def_property_readonly("block_size", &DyadicMeasure::block_size)
        .def_property_readonly("blocks", &DyadicMeasure::blocks)
        .def_property_readonly("depth", &DyadicMeasure::depth)
        .def_property_readonly("total_mass", &DyadicMeasure::total_mass)
        .def("cells",
             [](const DyadicMeasure& mu) {
                 std::vector<std::pair<std::string, double>> out;
                 for (const auto& c : mu.cells()) out.emplace_back(c.path, c.mass);
                 return out;
             })
        .def("masses_at",
             [](const DyadicMeasure& mu, int depth) {
                 std::vector<std::pair<std::string, double>> out;
                 for (const auto& c : mu.masses_at(depth))
                     out.emplace_back(c.path, c.mass);
                 return out;
             },
             py::arg("depth"));

    py::class_<UniformityProfile>(mod, "UniformityProfile")
        .def(py::init([](int dim, int block_size, int blocks, double eta, int k_lo,
                         const std::vector<double>& phis) {
                 UniformityProfile prof;
                 prof.dim = dim;
                 prof.block_size = block_size;
                 prof.blocks = blocks;
                 prof.eta = eta;
                 prof.k_lo = k_lo;
                 prof.phis = phis;
                 prof.validate();
                 return prof;
             }),
             py::arg("dim"), py::arg("block_size"), py::arg("blocks"),
             py::arg("eta"), py::arg("k_lo"), py::arg("phis"))
        .def_readonly("dim", &UniformityProfile::dim)
        .def_readonly("block_size", &UniformityProfile::block_size)
        .def_readonly("blocks", &UniformityProfile::blocks)
        .def_readonly("eta", &UniformityProfile::eta)
        .def_readonly("k_lo", &UniformityProfile::k_lo)
        .def_readonly("phis", &UniformityProfile::phis)
        .def("phi", &UniformityProfile::phi, py::arg("k"));

    // ---- regularity ------------------------------------------------------
    mod.def("verify_delta_set",
            [](const PointSet& P, double s) {
                return regularity_dict(verify_delta_set(P, s));
            },
            py::arg("points"), py::arg("s"),
            "Best ball-normalized regularity constant over the tested family.");
    mod.def("verify_katz_tao",
            [](const PointSet& P, double s) {
                return regularity_dict(verify_katz_tao(P, s));
            },
            py::arg("points"), py::arg("s"),
            "Best Katz-Tao regularity constant over the tested family.");
    mod.def("katz_tao_decompose",
            [](const PointSet& P, double t, double C, double eps) {
                const DecompositionReport r = katz_tao_decompose(P, t, C, eps);
                py::dict d;
                d["parts"] = r.parts;
                d["N"] = r.N;
                d["H"] = r.H;
                d["bound_rhs"] = r.bound_rhs;
                d["bound_ok"] = r.bound_ok;
                d["premise_measured_C"] = r.premise_measured_C;
                d["premise_ok"] = r.premise_ok;
                d["part_best_C"] = r.part_best_C;
                return d;
            },
            py::arg("points"), py::arg("t"), py::arg("C"), py::arg("eps"),
            "Partition into parts that are Katz-Tao (delta,t,1)-sets.");
    mod.def("extract_regular_subset",
            [](const PointSet& A, double s, double kappa) {
                const ExtractionReport r = extract_regular_subset(A, s, kappa);
                py::dict d;
                d["kept"] = r.kept;
                d["content"] = r.content;
                d["kappa"] = r.kappa;
                d["s"] = r.s;
                return d;
            },
            py::arg("points"), py::arg("s"), py::arg("kappa"));
    mod.def("covering_number",
            [](const PointSet& ps, int scale_exp) {
                return covering_number(ps, Scale(scale_exp));
            },
            py::arg("points"), py::arg("scale_exp"));

    // ---- duality ---------------------------------------------------------
    mod.def("dualize_point",
            [](const Point2& p) {
                const SlopeInterceptLine l = dualize_point(p);
                return std::make_pair(l.slope, l.intercept);
            },
            py::arg("p"), "Point (a,b) -> (slope, intercept) of {y = ax + b}.");
    mod.def("dualize_line",
            [](double slope, double intercept) {
                const Point2 p = dualize_line({slope, intercept});
                return std::make_pair(p.x, p.y);
            },
            py::arg("slope"), py::arg("intercept"),
            "Line {y = cx + d} -> point (-c, d).");
    mod.def("to_angle_form",
            [](double slope, double intercept) {
                return to_angle_form({slope, intercept});
            },
            py::arg("slope"), py::arg("intercept"));
    mod.def("from_angle_form",
            [](const Line& l) {
                const SlopeInterceptLine s = from_angle_form(l);
                return std::make_pair(s.slope, s.intercept);
            },
            py::arg("line"));
    mod.def("check_duality_incidence",
            [](const Point2& p, double slope, double intercept) {
                const DualityIncidence d = check_duality_incidence(p, {slope, intercept});
                py::dict out;
                out["lhs"] = d.lhs;
                out["rhs"] = d.rhs;
                out["lhs_residual"] = d.lhs_residual;
                out["rhs_residual"] = d.rhs_residual;
                return out;
            },
            py::arg("p"), py::arg("slope"), py::arg("intercept"));

    // ---- incidences ------------------------------------------------------
    mod.def("count_incidences",
            [](const PointSet& P, const std::vector<Tube>& tubes,
               const std::string& method) {
                if (method != "grid" && method != "brute")
                    throw std::invalid_argument("method must be 'grid' or 'brute'");
                return incidence_dict(count_incidences(
                    P, tube_set(tubes),
                    method == "grid" ? CountMethod::grid : CountMethod::brute));
            },
            py::arg("points"), py::arg("tubes"), py::arg("method") = "grid");
    mod.def("check_fu_ren",
            [](const PointSet& P, const std::vector<Tube>& tubes, double s, double t,
               double eps) {
                return incidence_dict(check_fu_ren(P, tube_set(tubes), s, t, eps));
            },
            py::arg("points"), py::arg("tubes"), py::arg("s"), py::arg("t"),
            py::arg("eps"),
            "Incidence count against the |P||T| delta^{kappa(s+t-1)-5eps} bound.");
    mod.def("multiplicity_buckets",
            [](const std::vector<std::pair<Point2, std::vector<Tube>>>& per_anchor,
               const PointSet& F, double eps, double tau, double s_report) {
                std::vector<AnchoredTubes> fams;
                fams.reserve(per_anchor.size());
                for (const auto& [anchor, tubes] : per_anchor)
                    fams.push_back({anchor, tubes});
                const MultiplicityBuckets mb =
                    multiplicity_buckets(fams, F, eps, tau, s_report);
                py::dict d;
                d["L"] = mb.L;
                d["eps"] = mb.eps;
                d["tau"] = mb.tau;
                d["f_bad"] = mb.f_bad;
                d["range_note"] = mb.range_note;
                py::list buckets;
                for (const auto& b : mb.buckets) {
                    py::dict bd;
                    bd["j"] = b.j;
                    bd["tubes"] = b.tubes.tubes;
                    bd["covered"] = b.covered;
                    bd["kept"] = b.kept;
                    bd["mass_ok"] = b.mass_ok;
                    bd["high_count"] = b.high_count;
                    buckets.append(bd);
                }
                d["buckets"] = buckets;
                return d;
            },
            py::arg("per_anchor"), py::arg("points"), py::arg("eps"), py::arg("tau"),
            py::arg("s_report") = 1.0);

    // ---- radial ----------------------------------------------------------
    mod.def("radial_project",
            [](const Point2& x, const PointSet& K, int depth) {
                return radial_project(x, K, depth);
            },
            py::arg("viewpoint"), py::arg("points"), py::arg("depth"));
    mod.def("arc_content",
            [](const ArcSet& s, double sigma) { return content_estimate(s, sigma); },
            py::arg("arcs"), py::arg("sigma"));
    mod.def("content_estimate",
            [](const PointSet& ps, double sigma) {
                return content_estimate(std::span<const Point2>(ps.points()), sigma,
                                        ps.scale());
            },
            py::arg("points"), py::arg("sigma"),
            "Truncated dyadic content of a set inside the unit square.");
    mod.def("estimate_dimension",
            [](const std::map<int, std::uint64_t>& counts) {
                const DimensionFit f = estimate_dimension(counts);
                py::dict d;
                d["slope"] = f.slope;
                d["residual"] = f.residual;
                d["n_scales"] = f.n_scales;
                return d;
            },
            py::arg("counts"),
            "Least-squares slope of log2(count) against the scale exponent.");
    mod.def("heavy_directions",
            [](const Point2& x, const PointSet& K, double Sigma, double eps,
               int depth) {
                py::list out;
                for (const auto& h : heavy_directions(x, K, Sigma, eps, depth)) {
                    py::dict d;
                    d["tube"] = h.tube;
                    d["arc_index"] = h.arc_index;
                    d["arc_count"] = h.arc_count;
                    d["tube_count"] = h.tube_count;
                    d["declared_min"] = h.declared_min;
                    out.append(d);
                }
                return out;
            },
            py::arg("viewpoint"), py::arg("points"), py::arg("Sigma"), py::arg("eps"),
            py::arg("depth"));
    mod.def("exceptional_scan",
            [](const PointSet& K, const PointSet& viewpoints, double sigma,
               const std::vector<int>& ladder, double min_dist, int threads) {
                const ScanReport r =
                    exceptional_scan(K, viewpoints, sigma, ladder, min_dist, threads);
                py::dict d;
                d["sigma"] = r.sigma;
                d["ladder"] = r.ladder;
                d["n_viewpoints"] = r.n_viewpoints;
                d["t_emp"] = r.t_emp;
                d["t_emp_residual"] = r.t_emp_residual;
                d["exc_slope"] = r.exc_slope;
                d["exc_slope_defined"] = r.exc_slope_defined;
                d["exc_residual"] = r.exc_residual;
                d["bound"] = r.bound;
                py::list rows;
                for (const auto& row : r.rows) {
                    py::dict rd;
                    rd["m"] = row.m;
                    rd["k_covering"] = row.k_covering;
                    rd["exc_lo"] = row.exc_lo;
                    rd["exc_mid"] = row.exc_mid;
                    rd["exc_hi"] = row.exc_hi;
                    rd["exc_covering"] = row.exc_covering;
                    rows.append(rd);
                }
                d["rows"] = rows;
                d["per_viewpoint_csv"] = r.per_viewpoint_csv;
                d["summary_csv"] = r.summary_csv;
                return d;
            },
            py::arg("points"), py::arg("viewpoints"), py::arg("sigma"),
            py::arg("ladder"), py::arg("min_dist"), py::arg("threads") = 0);

    // ---- uniformization --------------------------------------------------
    mod.def("min_block_size", &min_block_size, py::arg("dim"), py::arg("eta"));
    mod.def("check_uniform",
            [](const DyadicMeasure& mu, const UniformityProfile& prof) {
                const UniformityCheck c = check_uniform(mu, prof);
                py::dict d;
                d["ok"] = c.ok;
                d["violation_k"] = c.violation_k;
                d["violation_path"] = c.violation_path;
                d["violation_mass"] = c.violation_mass;
                return d;
            },
            py::arg("measure"), py::arg("profile"));
    mod.def("uniformize",
            [](const DyadicMeasure& mu, double eta) {
                UniformizeResult r = uniformize(mu, eta);
                py::dict d;
                d["measure"] = r.measure;
                d["profile"] = r.profile;
                py::list levels;
                for (const auto& lv : r.levels) {
                    py::dict ld;
                    ld["k"] = lv.k;
                    ld["light_discarded"] = lv.light_discarded;
                    ld["class_discarded"] = lv.class_discarded;
                    ld["retained"] = lv.retained;
                    ld["phi"] = lv.phi;
                    levels.append(ld);
                }
                d["levels"] = levels;
                return d;
            },
            py::arg("measure"), py::arg("eta"),
            "Level-by-level restriction to a block-uniform sub-measure.");
    mod.def("stable_scale_search",
            [](const UniformityProfile& prof, double eps) {
                const StableScaleResult r = stable_scale_search(prof, eps);
                py::dict d;
                d["delta_exp"] = r.Delta.exponent;
                d["sigma"] = r.Sigma;
                d["k_index"] = r.k_index;
                d["steps"] = r.steps;
                return d;
            },
            py::arg("profile"), py::arg("eps"));

    // ---- generators ------------------------------------------------------
    mod.def("cantor_product",
            [](int base, const std::vector<int>& digits, int depth) {
                return cantor_product({base, digits}, depth);
            },
            py::arg("base"), py::arg("digits"), py::arg("depth"));
    mod.def("set_on_line",
            [](double s, int scale_exp, double theta, double offset) {
                return set_on_line(s, Scale(scale_exp), Line(theta, offset));
            },
            py::arg("s"), py::arg("scale_exp"), py::arg("theta") = 0.0,
            py::arg("offset") = 0.0);
    mod.def("grid_set", [](int scale_exp) { return grid_set(Scale(scale_exp)); },
            py::arg("scale_exp"));
    mod.def("random_delta_set",
            [](double s, int scale_exp, std::uint64_t seed) {
                return random_delta_set(s, Scale(scale_exp), seed);
            },
            py::arg("s"), py::arg("scale_exp"), py::arg("seed"));
    mod.def("furstenberg_config",
            [](double s, double t, int scale_exp, std::uint64_t seed) {
                FurstenbergConfig fc = furstenberg_config(s, t, Scale(scale_exp), seed);
                py::dict d;
                d["tubes"] = fc.tubes.tubes;
                d["per_tube"] = fc.per_tube;
                d["union_set"] = fc.union_set;
                d["gamma"] = fc.gamma;
                return d;
            },
            py::arg("s"), py::arg("t"), py::arg("scale_exp"), py::arg("seed"));
    mod.def("seeded_measure", &seeded_measure, py::arg("dim"), py::arg("block_size"),
            py::arg("blocks"), py::arg("seed"));

    // ---- experiments -----------------------------------------------------
    mod.def("run_experiment",
            [](const std::string& config_text, const std::string& out_dir,
               std::optional<std::uint64_t> seed, int threads) {
                const ExperimentConfig cfg = ExperimentConfig::parse(config_text);
                return run_experiment(cfg, out_dir, seed, threads);
            },
            py::arg("config_text"), py::arg("out_dir"),
            py::arg("seed") = std::nullopt, py::arg("threads") = 0,
            "Run a canned suite from config text; returns the written paths.");

    mod.attr("__version__") = "0.1.0";
}
