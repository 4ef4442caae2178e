// Command-line driver: ties the group constructors, orbit enumeration and
// the estimators together with reproducible file output.

#include "chg/dimension.hpp"
#include "chg/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace chg;
using json = nlohmann::ordered_json;

namespace {

json default_config() {
    json cfg;
    cfg["task"] = "classify";
    cfg["seed"] = 1;
    cfg["threads"] = 1;
    cfg["out"] = "chg-out";
    cfg["group"] = {{"constructor", "boost"}, {"s", 0.7}, {"t", 1},   {"p", 2},
                    {"q", 3},                {"r", 7},   {"n", 2},   {"path", ""}};
    cfg["budgets"] = {{"max_word_length", 8}, {"max_elements", 400000}, {"samples", 100000}};
    cfg["limitset"] = {{"method", "conjugate-fixed-points"}, {"cutoff", 5.0}};
    cfg["exponent"] = {{"radius_cap", 0.0}};
    cfg["boxdim"] = {{"source", "limitset"}, {"gauge", "koranyi"}, {"scale_lo", 0.02},
                     {"scale_hi", 0.8},      {"scale_count", 6},   {"depth", 8}};
    cfg["orbit"] = {{"spill", false}, {"grid_count", 32}};
    cfg["fractal"] = {{"kind", "sierpinski"}, {"depth", 4}, {"point", json::array({0.1, 0.2})}};
    cfg["ply_pole"] = json::array({0.0, 0.0, 0.0, 1.0});
    return cfg;
}

void merge_into(json& base, const json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
            merge_into(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GeneratorSystem build_group_impl(const json& g);

// construction failures here are bad configuration, not internal faults
GeneratorSystem build_group(const json& g) {
    try {
        return build_group_impl(g);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

GeneratorSystem build_group_impl(const json& g) {
    const std::string kind = g.at("constructor");
    const int n = g.value("n", 2);
    if (kind == "boost") {
        GeneratorSystem sys;
        sys.labels = {"g"};
        sys.generators = {boost(g.value("s", 0.7), n)};
        return sys;
    }
    if (kind == "schottky-boosts") {
        if (n < 2) throw InputError("schottky-boosts needs n >= 2");
        const double s = g.value("s", 1.0);
        return schottky_from_powers({boost(s, n, 0), boost(s, n, 1)}, g.value("t", 1));
    }
    if (kind == "dyck") return dyck_rep(g.value("p", 2), g.value("q", 3), g.value("r", 7));
    if (kind == "dyck-real")
        return dyck_rep_real(g.value("p", 2), g.value("q", 3), g.value("r", 7), n);
    if (kind == "polygon") return polygon_rep(g.value("p", 6), g.value("q", 3));
    if (kind == "heisenberg") return heisenberg_lattice(g.value("n", 1));
    if (kind == "file") {
        const std::string path = g.value("path", "");
        if (path.empty()) throw InputError("group.path required for constructor=file");
        return load_generator_system(path);
    }
    throw InputError("unknown group constructor '" + kind + "'");
}

json point_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v(k).real());
        out.push_back(v(k).imag());
    }
    return out;
}

json run_classify(const GeneratorSystem& sys) {
    json out = json::array();
    for (int i = 0; i < sys.size(); ++i) {
        json rec;
        rec["label"] = sys.labels[i];
        const Isometry& g = sys.generators[i];
        if (g.is_identity()) {
            rec["type"] = "identity";
            out.push_back(rec);
            continue;
        }
        const auto cls = classify(g);
        switch (cls.type) {
            case IsometryType::Elliptic:
                rec["type"] = "elliptic";
                rec["fixed_point"] = point_json(cls.fixed_interior->coords());
                break;
            case IsometryType::Parabolic:
                rec["type"] = "parabolic";
                rec["fixed_point"] = point_json(cls.fixed_boundary->coords());
                break;
            case IsometryType::Hyperbolic:
                rec["type"] = "hyperbolic";
                rec["translation_length"] = cls.translation_length;
                rec["attracting"] = point_json(cls.attracting->coords());
                rec["repelling"] = point_json(cls.repelling->coords());
                break;
        }
        out.push_back(rec);
    }
    return json{{"generators", out}};
}

json run_orbit(const GeneratorSystem& sys, const json& cfg,
               const std::filesystem::path& outdir) {
    OrbitOptions opts;
    opts.threads = cfg.at("threads");
    opts.max_elements = cfg.at("budgets").at("max_elements");
    const OrbitIndex index = enumerate_ball(sys, cfg.at("budgets").at("max_word_length"), opts);

    double rmax = 0.0;
    for (const auto& e : index.elements()) rmax = std::max(rmax, e.displacement);
    const int grid_count = cfg.at("orbit").at("grid_count");
    std::vector<double> grid;
    for (int i = 1; i <= grid_count; ++i) grid.push_back(rmax * i / grid_count);
    const OrbitCounts counts = orbit_counts(index, grid);

    std::ofstream csv(outdir / "orbit_counts.csv");
    csv << "# radius,count\n";
    for (size_t i = 0; i < counts.radii.size(); ++i)
        csv << format_real(counts.radii[i]) << ',' << counts.counts[i] << '\n';

    if (cfg.at("orbit").at("spill").get<bool>()) {
        std::ofstream spill(outdir / "orbit_index.bin", std::ios::binary);
        write_orbit_spill(spill, index);
    }

    json out;
    out["elements"] = index.size();
    out["merges"] = index.merges();
    out["max_word_length"] = index.max_word_length();
    out["max_displacement"] = rmax;
    out["truncated"] = index.truncated();
    return out;
}

json run_limitset(const GeneratorSystem& sys, const json& cfg,
                  const std::filesystem::path& outdir) {
    LimitOptions opts;
    opts.orbit.threads = cfg.at("threads");
    opts.orbit.max_elements = cfg.at("budgets").at("max_elements");
    opts.endpoint_cutoff = cfg.at("limitset").at("cutoff");
    const std::string method_name = cfg.at("limitset").at("method");
    const LimitMethod method = method_name == "orbit-endpoint"
                                   ? LimitMethod::OrbitEndpoint
                                   : LimitMethod::ConjugateFixedPoints;
    const PointCloud cloud =
        limit_sample(sys, cfg.at("budgets").at("max_word_length"), method, opts);

    std::ofstream csv(outdir / "limit_cloud.csv");
    write_cloud_csv(csv, cloud);
    if (cloud.ball_dim == 2) {
        const auto& pole_cfg = cfg.at("ply_pole");
        Vec pole(2);
        pole << cplx(pole_cfg[0], pole_cfg[1]), cplx(pole_cfg[2], pole_cfg[3]);
        std::ofstream ply(outdir / "limit_cloud.ply");
        write_cloud_ply(ply, cloud, pole);
    }

    json out;
    out["points"] = cloud.points.size();
    out["method"] = cloud.method;
    out["elementary_warning"] = cloud.elementary_warning;
    return out;
}

json run_exponent(const GeneratorSystem& sys, const json& cfg) {
    ExponentBudget budget;
    budget.max_word_len = cfg.at("budgets").at("max_word_length");
    budget.max_elements = cfg.at("budgets").at("max_elements");
    budget.threads = cfg.at("threads");
    budget.radius_cap = cfg.at("exponent").at("radius_cap");
    const ExponentEstimate est = critical_exponent(sys, budget);
    json out;
    out["delta"] = est.delta;
    out["method"] = est.method;
    out["fit_r2"] = est.fit_r2;
    out["window"] = json::array({est.window_lo, est.window_hi});
    out["bracket"] = json::array({est.bracket_lo, est.bracket_hi});
    out["clamped"] = est.clamped;
    out["budget_flag"] = est.budget_flag;
    return out;
}

json run_boxdim(const json& cfg, const std::filesystem::path& outdir) {
    const json& bd = cfg.at("boxdim");
    const std::string source = bd.at("source");
    const std::uint64_t seed = cfg.at("seed");
    const std::size_t samples = cfg.at("budgets").at("samples");

    std::vector<Vec> points;
    if (source == "sphere") {
        points = sphere_sample(cfg.at("group").value("n", 2), samples, seed);
    } else if (source == "complex-circle") {
        points = complex_circle_sample(samples, seed);
    } else if (source == "real-circle") {
        points = real_circle_sample(samples, seed);
    } else if (source == "sierpinski") {
        points = fractal_sample(FractalKind::Sierpinski, samples, bd.at("depth"), seed);
    } else if (source == "menger") {
        points = fractal_sample(FractalKind::Menger, samples, bd.at("depth"), seed);
    } else if (source == "limitset") {
        const GeneratorSystem sys = build_group(cfg.at("group"));
        LimitOptions opts;
        opts.orbit.threads = cfg.at("threads");
        opts.orbit.max_elements = cfg.at("budgets").at("max_elements");
        const PointCloud cloud = limit_sample(
            sys, cfg.at("budgets").at("max_word_length"),
            LimitMethod::ConjugateFixedPoints, opts);
        points = cloud.coords();
        if (points.size() < 1000)
            throw InputError("limit-set cloud has fewer than 10^3 points; raise "
                             "budgets.max_word_length");
    } else {
        throw InputError("unknown boxdim source '" + source + "'");
    }

    const Gauge gauge = bd.at("gauge") == "euclidean" ? Gauge::Chordal : Gauge::Koranyi;
    const auto scales =
        log_spaced_scales(bd.at("scale_lo"), bd.at("scale_hi"), bd.at("scale_count"));
    const DimensionEstimate est = box_dimension(points, gauge, scales);

    std::ofstream csv(outdir / "boxdim_counts.csv");
    csv << "# scale,count\n";
    for (size_t i = 0; i < est.scales.size(); ++i)
        csv << format_real(est.scales[i]) << ',' << est.counts[i] << '\n';

    json out;
    out["dim"] = est.dim;
    out["gauge"] = est.gauge;
    out["fit_r2"] = est.fit_r2;
    out["points"] = points.size();
    return out;
}

json run_charvar(const GeneratorSystem& sys) {
    if (sys.ball_dim() != 2)
        throw InputError("charvar: zeta is defined for PU(2,1) (use dyck-real or n=2)");
    json zetas = json::array();
    for (int i = 0; i < sys.size(); ++i) {
        json rec;
        rec["label"] = sys.labels[i];
        rec["zeta"] = zeta(sys.generators[i]);
        zetas.push_back(rec);
    }
    json out;
    out["zeta"] = zetas;
    if (sys.size() == 3) {
        const Mat prod = (sys.generators[0] * sys.generators[1] * sys.generators[2]).matrix();
        if (projective_distance(prod, Mat::Identity(3, 3)) < 1e-8)
            out["weil_dimension"] = weil_dimension(sys.generators[0], sys.generators[1],
                                                   sys.generators[2]);
    }
    return out;
}

json run_fractal(const json& cfg) {
    const json& fc = cfg.at("fractal");
    const std::string kind_name = fc.at("kind");
    const FractalKind kind =
        kind_name == "menger" ? FractalKind::Menger : FractalKind::Sierpinski;
    std::vector<double> point;
    for (const auto& c : fc.at("point")) point.push_back(c.get<double>());
    json out;
    out["kind"] = kind_name;
    out["depth"] = fc.at("depth");
    out["member"] = fractal_member(kind, point, fc.at("depth"));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chgtool: complex hyperbolic discrete-group toolkit"};
    std::string config_path, task_flag, out_flag;
    int seed_flag = -1, threads_flag = 0;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--task", task_flag, "task override");
    app.add_option("--seed", seed_flag, "seed override");
    app.add_option("--threads", threads_flag, "thread count override");
    app.add_option("--out", out_flag, "output directory override");
    app.add_flag("--print-config", print_config, "print the full default config and exit");
    CLI11_PARSE(app, argc, argv);

    if (print_config) {
        std::cout << default_config().dump(2) << '\n';
        return 0;
    }

    json cfg = default_config();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw InputError("cannot open config: " + config_path);
            json user;
            in >> user;
            merge_into(cfg, user);
        }
        if (!task_flag.empty()) cfg["task"] = task_flag;
        if (seed_flag >= 0) cfg["seed"] = seed_flag;
        if (threads_flag > 0) cfg["threads"] = threads_flag;
        if (!out_flag.empty()) cfg["out"] = out_flag;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    }

    try {
        const std::string task = cfg.at("task");
        const std::filesystem::path outdir = cfg.at("out").get<std::string>();
        std::filesystem::create_directories(outdir);

        json summary;
        summary["task"] = task;
        summary["seed"] = cfg.at("seed");

        if (task == "classify") {
            summary["result"] = run_classify(build_group(cfg.at("group")));
        } else if (task == "orbit") {
            summary["result"] = run_orbit(build_group(cfg.at("group")), cfg, outdir);
            if (summary["result"]["truncated"].get<bool>()) {
                std::ofstream(outdir / "summary.json") << summary.dump(2) << '\n';
                std::cout << summary.dump() << '\n';
                std::cerr << "budget exhausted: orbit index truncated\n";
                return 3;
            }
        } else if (task == "limitset") {
            summary["result"] = run_limitset(build_group(cfg.at("group")), cfg, outdir);
        } else if (task == "exponent") {
            summary["result"] = run_exponent(build_group(cfg.at("group")), cfg);
        } else if (task == "boxdim") {
            summary["result"] = run_boxdim(cfg, outdir);
        } else if (task == "charvar") {
            summary["result"] = run_charvar(build_group(cfg.at("group")));
        } else if (task == "fractal") {
            summary["result"] = run_fractal(cfg);
        } else {
            std::cerr << "input error: unknown task '" << task << "'\n";
            return 2;
        }

        std::ofstream(outdir / "summary.json") << summary.dump(2) << '\n';
        std::cout << summary.dump() << '\n';
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "internal invariant failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal invariant failure: " << e.what() << '\n';
        return 4;
    }
}
