#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "acceptance.hpp"
#include "fermat/helmholtz.hpp"
#include "fermat/parallel.hpp"
#include "fermat/propagator.hpp"
#include "fermat/raytrace.hpp"
#include "fermat/synthesis.hpp"
#include "fermat/variational.hpp"
#include "fermat/zetareg.hpp"
#include "manifest.hpp"
#include "scenario.hpp"

namespace fermat::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> medium_keys = {
    "medium",          "medium.kind",      "medium.dim",     "medium.n0",
    "medium.g",        "medium.alpha",     "medium.axis",    "medium.n1",
    "medium.n2",       "medium.width",     "medium.position", "medium.box_lo",
    "medium.box_hi",   "medium.file",      "medium.cubic",   "medium.scale",
    "medium.dispersion", "medium.dispersion.omega", "medium.dispersion.n", "medium.dispersion.omega_ref"};

std::set<std::string> grid_keys(const std::string& t) {
    return {t + ".grid", t + ".grid.n", t + ".grid.h", t + ".grid.center"};
}

std::set<std::string> absorber_keys(const std::string& t) {
    return {t + ".absorber", t + ".absorber.width", t + ".absorber.strength"};
}

std::set<std::string> schema_for(const std::string& kind) {
    std::set<std::string> s = {"kind", "seed", "c", "threads"};
    auto add = [&](std::initializer_list<std::string> keys) { s.insert(keys.begin(), keys.end()); };
    auto merge = [&](const std::set<std::string>& keys) { s.insert(keys.begin(), keys.end()); };
    if (kind != "zeta" && kind != "verify") merge(medium_keys);
    if (kind == "trace") {
        add({"trace", "trace.x0", "trace.direction", "trace.s_max", "trace.ds"});
    } else if (kind == "connect") {
        add({"connect", "connect.x_i", "connect.x_f", "connect.ds", "connect.initial_direction", "connect.max_iter",
             "connect.tol"});
    } else if (kind == "minimize") {
        add({"minimize", "minimize.x_i", "minimize.x_f", "minimize.vertices", "minimize.max_iter",
             "minimize.grad_tol", "minimize.init", "minimize.compare_connect"});
    } else if (kind == "kernel") {
        add({"kernel", "kernel.x0", "kernel.omega", "kernel.S", "kernel.slices", "kernel.max_phase", "kernel.residual",
             "kernel.probes"});
        merge(grid_keys("kernel"));
    } else if (kind == "stationary") {
        add({"stationary", "stationary.x0", "stationary.omega", "stationary.eps", "stationary.dS", "stationary.S_max",
             "stationary.window", "stationary.source_cutoff", "stationary.residual_radius", "stationary.csv"});
        merge(grid_keys("stationary"));
        merge(absorber_keys("stationary"));
    } else if (kind == "helmholtz") {
        add({"helmholtz", "helmholtz.x0", "helmholtz.omega", "helmholtz.source_radius", "helmholtz.compare_stationary",
             "helmholtz.probes", "helmholtz.csv"});
        merge(grid_keys("helmholtz"));
        merge(absorber_keys("helmholtz"));
    } else if (kind == "synth") {
        add({"synth", "synth.x0", "synth.probes", "synth.threshold", "synth.fermat", "synth.ray_ds",
             "synth.spectrum", "synth.spectrum.omega0", "synth.spectrum.sigma", "synth.spectrum.d_omega",
             "synth.spectrum.longest_time", "synth.spectrum.width", "synth.times", "synth.times.count",
             "synth.times.t0", "synth.times.dt", "synth.stationary", "synth.stationary.dS", "synth.stationary.S_max",
             "synth.stationary.window", "synth.stationary.source_cutoff"});
        merge(grid_keys("synth"));
        merge(absorber_keys("synth"));
    } else if (kind == "zeta") {
        add({"zeta", "zeta.operators", "zeta.operators[].a", "zeta.operators[].x", "zeta.T", "zeta.random_T",
             "zeta.partial_N"});
    } else if (kind == "verify") {
        add({"verify", "verify.criteria"});
    }
    return s;
}

struct Context {
    const Scenario* sc = nullptr;
    fs::path scenario_dir;
    std::uint64_t seed = 0;
    double c = 1.0;
    RunRecord* rec = nullptr;
    std::ostream* out = nullptr;
    std::vector<int> criteria;
};

IndexField build_medium(const Context& ctx) {
    const Scenario& sc = *ctx.sc;
    if (!sc.has("medium")) sc.fail("medium", "a [medium] table is required");
    const std::string kind = sc.string("medium.kind");
    const int dim = static_cast<int>(sc.integer("medium.dim", 2));
    if (dim < 1 || dim > 3) sc.fail("medium.dim", "dimension must be 1, 2 or 3");
    Box box;
    box.lo = sc.vec("medium.box_lo", box.lo);
    box.hi = sc.vec("medium.box_hi", box.hi);
    if (sc.has("medium.box_lo") && sc.numbers("medium.box_lo").size() < static_cast<size_t>(dim))
        sc.fail("medium.box_lo", "needs one entry per dimension");
    if (sc.has("medium.box_hi") && sc.numbers("medium.box_hi").size() < static_cast<size_t>(dim))
        sc.fail("medium.box_hi", "needs one entry per dimension");
    try {
        IndexField f = IndexField::homogeneous(dim, 1.0, box);
        if (kind == "homogeneous") {
            f = IndexField::homogeneous(dim, sc.number("medium.n0", 1.0), box);
        } else if (kind == "linear-stratified") {
            f = IndexField::linear_stratified(dim, sc.number("medium.n0"), sc.number("medium.g"),
                                              static_cast<int>(sc.integer("medium.axis", dim > 1 ? 1 : 0)), box);
        } else if (kind == "parabolic-grin") {
            f = IndexField::parabolic_grin(dim, sc.number("medium.n0"), sc.number("medium.alpha"),
                                           static_cast<int>(sc.integer("medium.axis", dim > 1 ? 0 : -1)), box);
        } else if (kind == "smooth-interface") {
            f = IndexField::smooth_interface(dim, sc.number("medium.n1"), sc.number("medium.n2"),
                                             sc.number("medium.width"), static_cast<int>(sc.integer("medium.axis", 0)),
                                             sc.number("medium.position", 0.0), box);
        } else if (kind == "user-grid") {
            fs::path file = sc.string("medium.file");
            if (file.is_relative()) file = ctx.scenario_dir / file;
            GridData g = read_grid_file(file.string());
            if (g.dim != dim && sc.has("medium.dim")) sc.fail("medium.dim", "does not match the grid file");
            f = IndexField::user_grid(std::move(g), sc.boolean("medium.cubic", false));
        } else {
            sc.fail("medium.kind", "unknown medium kind '" + kind +
                                       "' (homogeneous, linear-stratified, parabolic-grin, smooth-interface, user-grid)");
        }
        if (sc.has("medium.scale")) f = f.scaled(sc.number("medium.scale"));
        if (sc.has("medium.dispersion")) {
            f = f.with_dispersion(Dispersion(sc.numbers("medium.dispersion.omega"), sc.numbers("medium.dispersion.n"),
                                             sc.number("medium.dispersion.omega_ref")));
        }
        return f;
    } catch (const fermat::Error& e) {
        sc.fail("medium", e.what());
    }
}

GridSpec build_grid(const Context& ctx, const std::string& table, int dim) {
    const Scenario& sc = *ctx.sc;
    const std::string t = table + ".grid";
    const long n = sc.integer(t + ".n");
    const double h = sc.number(t + ".h");
    if (n < 3) sc.fail(t + ".n", "need at least 3 points per axis");
    if (!(h > 0)) sc.fail(t + ".h", "spacing must be positive");
    return GridSpec::centered(dim, static_cast<int>(n), h, sc.vec(t + ".center", Vec3::Zero()));
}

Absorber build_absorber(const Context& ctx, const std::string& table) {
    Absorber a;
    a.width = ctx.sc->number(table + ".absorber.width", 0.0);
    a.strength = ctx.sc->number(table + ".absorber.strength", 1.0);
    if (a.width < 0) ctx.sc->fail(table + ".absorber.width", "must be non-negative");
    return a;
}

double positive(const Scenario& sc, const std::string& key) {
    const double v = sc.number(key);
    if (!(v > 0)) sc.fail(key, "must be positive");
    return v;
}

double positive(const Scenario& sc, const std::string& key, double fallback) {
    return sc.has(key) ? positive(sc, key) : fallback;
}

nlohmann::json vec_json(const Vec3& v, int dim) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < dim; ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json cjson(cdouble z) { return nlohmann::json::array({z.real(), z.imag()}); }

void run_trace(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    RayState init;
    init.x = sc.vec("trace.x0");
    init.t = sc.vec("trace.direction");
    const double s_max = positive(sc, "trace.s_max");
    const double ds = positive(sc, "trace.ds");
    const GeodesicSolution sol = trace_ray(f, init, s_max, ds, ctx.c);
    write_ray_csv(ctx.rec->file("ray.csv").string(), sol);
    double drift = 0.0;
    for (const RayState& st : sol.samples) drift = std::max(drift, std::abs(st.t.norm() - 1.0));
    nlohmann::json summary = {{"samples", sol.samples.size()},
                              {"exited", sol.exited},
                              {"final_position", vec_json(sol.samples.back().x, f.dim())},
                              {"T_opt", sol.samples.back().T_opt},
                              {"optical_time", optical_time(sol)},
                              {"tangent_drift", drift}};
    if (sol.samples.size() - (sol.exited ? 1 : 0) >= 5) summary["geodesic_residual"] = geodesic_residual(sol);
    const ChristoffelTensor G = christoffel(f, sol.samples.front().x);
    nlohmann::json gam = nlohmann::json::array();
    for (int i = 0; i < f.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < f.dim(); ++j) {
            nlohmann::json col = nlohmann::json::array();
            for (int k = 0; k < f.dim(); ++k) col.push_back(G.g[i][j][k]);
            row.push_back(col);
        }
        gam.push_back(row);
    }
    summary["christoffel_at_start"] = gam;
    summary["acceleration_at_start"] = vec_json(ray_acceleration(f, sol.samples.front().x, sol.samples.front().t), f.dim());
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "trace: " << sol.samples.size() << " samples, T_opt = " << sol.samples.back().T_opt
             << (sol.exited ? " (left the medium)" : "") << '\n';
}

void run_connect(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const Vec3 a = sc.vec("connect.x_i"), b = sc.vec("connect.x_f");
    ConnectOptions o;
    o.c = ctx.c;
    o.max_iter = static_cast<int>(sc.integer("connect.max_iter", o.max_iter));
    o.tol = positive(sc, "connect.tol", o.tol);
    if (sc.has("connect.initial_direction")) o.initial_direction = sc.vec("connect.initial_direction");
    const GeodesicSolution sol = connect(f, a, b, positive(sc, "connect.ds"), o);
    write_ray_csv(ctx.rec->file("ray.csv").string(), sol);
    nlohmann::json summary = {{"samples", sol.samples.size()},
                              {"optical_time", optical_time(sol)},
                              {"miss", (sol.samples.back().x - b).norm()},
                              {"arc_length", sol.samples.back().s}};
    if (sol.samples.size() >= 5) summary["geodesic_residual"] = geodesic_residual(sol);
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "connect: optical time " << optical_time(sol) << '\n';
}

void run_minimize(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const Vec3 a = sc.vec("minimize.x_i"), b = sc.vec("minimize.x_f");
    const long M = sc.integer("minimize.vertices", 101);
    if (M < 3) sc.fail("minimize.vertices", "need at least 3 vertices");
    MinimizeOptions o;
    o.c = ctx.c;
    o.max_iter = static_cast<int>(sc.integer("minimize.max_iter", o.max_iter));
    o.grad_tol = positive(sc, "minimize.grad_tol", o.grad_tol);
    if (sc.has("minimize.init")) {
        fs::path p = sc.string("minimize.init");
        if (p.is_relative()) p = ctx.scenario_dir / p;
        o.init = read_polyline_csv(p.string());
    }
    MinimizeReport rep;
    const PathPolyline path = minimize_path(f, a, b, static_cast<int>(M), o, &rep);
    write_polyline_csv(ctx.rec->file("path.csv").string(), path, f.dim());
    nlohmann::json summary = {{"path_time", path_time(f, path, ctx.c)},
                              {"iterations", rep.iterations},
                              {"gradient_norm", rep.gradient_norm}};
    if (sc.boolean("minimize.compare_connect", false)) {
        ConnectOptions co;
        co.c = ctx.c;
        const GeodesicSolution ray = connect(f, a, b, (b - a).norm() / static_cast<double>(M - 1), co);
        const double T = optical_time(ray);
        summary["connect_optical_time"] = T;
        summary["relative_difference"] = std::abs(T - summary["path_time"].get<double>()) / T;
    }
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "minimize: path time " << summary["path_time"].get<double>() << " after " << rep.iterations
             << " iterations\n";
}

void run_kernel(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const GridSpec g = build_grid(ctx, "kernel", f.dim());
    const Vec3 x0 = sc.vec("kernel.x0", Vec3::Zero());
    const double omega = positive(sc, "kernel.omega");
    const double S = positive(sc, "kernel.S");
    const long M = sc.integer("kernel.slices");
    if (M < 1) sc.fail("kernel.slices", "need at least one slice");
    SliceOptions so;
    so.c = ctx.c;
    so.max_phase = positive(sc, "kernel.max_phase", so.max_phase);
    const ComplexGrid psi = sliced_kernel(f, x0, omega, S, static_cast<int>(M), g, so);
    write_kernel_file(ctx.rec->file("kernel.bin").string(), psi);
    write_kernel_csv(ctx.rec->file("kernel.csv").string(), psi);
    nlohmann::json summary = {{"nodes", g.size()}, {"S", S}, {"slices", M}};
    if (const auto n = f.constant_index(); n && !f.dispersive()) {
        // exact kernel: free kernel times the constant potential phase
        const double V = (1.0 - *n * *n) * omega * omega / (ctx.c * ctx.c);
        double err = 0.0, ref = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            const cdouble exact = free_kernel(g.node(i), x0, S, f.dim()) * std::exp(cdouble(0.0, -V * S));
            err = std::max(err, std::abs(psi.values[i] - exact));
            ref = std::max(ref, std::abs(exact));
        }
        summary["max_error_vs_exact"] = err;
        summary["max_exact"] = ref;
    }
    if (sc.boolean("kernel.residual", false)) {
        const double dS = S / static_cast<double>(M);
        if (M < 2) sc.fail("kernel.slices", "the Schroedinger residual needs at least 2 slices");
        const ComplexGrid before = sliced_kernel(f, x0, omega, S - dS, static_cast<int>(M - 1), g, so);
        const ComplexGrid after = sliced_kernel(f, x0, omega, S + dS, static_cast<int>(M + 1), g, so);
        summary["schrodinger_residual"] = schrodinger_residual(f, before, psi, after, omega, ctx.c);
    }
    if (sc.has("kernel.probes")) {
        nlohmann::json probes = nlohmann::json::array();
        ProperTimeOptions po;
        po.c = ctx.c;
        po.grid = g;
        po.absorber = Absorber{};
        for (const Vec3& x : sc.vecs("kernel.probes")) {
            if (!f.constant_index()) sc.fail("kernel.probes", "proper-time probes need a homogeneous medium");
            const ProperTimeResult r = proper_time_integral(f, x, x0, omega, po);
            probes.push_back({{"x", vec_json(x, f.dim())}, {"psi_st", cjson(r.extrapolated)}});
        }
        summary["proper_time_probes"] = probes;
    }
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "kernel: " << g.size() << " nodes after " << M << " slices\n";
}

StationaryOptions stationary_options(const Context& ctx, const std::string& t) {
    const Scenario& sc = *ctx.sc;
    StationaryOptions o;
    o.c = ctx.c;
    o.absorber = build_absorber(ctx, t.substr(0, t.find('.')));
    o.eps = sc.number(t + ".eps", 0.0);
    o.dS = sc.number(t + ".dS", 0.0);
    o.S_max = sc.number(t + ".S_max", 0.0);
    o.window = sc.number(t + ".window", 0.0);
    o.source_cutoff = positive(sc, t + ".source_cutoff", o.source_cutoff);
    if (o.eps < 0 || o.dS < 0 || o.S_max < 0 || o.window < 0) sc.fail(t, "eps, dS, S_max and window must be >= 0");
    return o;
}

nlohmann::json residual_json(const ResidualReport& r) {
    return {{"max", r.max}, {"l2", r.l2}, {"delta_check", cjson(r.delta_check)}, {"nodes", r.nodes}};
}

void run_stationary(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const GridSpec g = build_grid(ctx, "stationary", f.dim());
    const Vec3 x0 = sc.vec("stationary.x0", Vec3::Zero());
    const double omega = positive(sc, "stationary.omega");
    const StationaryOptions o = stationary_options(ctx, "stationary");
    const SpectralKernel sk = stationary_kernel(f, x0, omega, g, o);
    write_kernel_file(ctx.rec->file("stationary.bin").string(), sk.psi);
    if (sc.boolean("stationary.csv", false)) write_kernel_csv(ctx.rec->file("stationary.csv").string(), sk.psi);
    HelmholtzProblem p{f, omega, g, x0, o.absorber, ctx.c, sc.number("stationary.residual_radius", 0.0)};
    nlohmann::json summary = {{"steps", sk.steps},
                              {"S_max", sk.S_max},
                              {"eps", sk.eps},
                              {"grid_evolution", sk.grid_evolution},
                              {"residual", residual_json(fd_residual(p, sk.psi))}};
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "stationary: residual max " << summary["residual"]["max"].get<double>() << '\n';
}

void run_helmholtz(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const GridSpec g = build_grid(ctx, "helmholtz", f.dim());
    const Vec3 x0 = sc.vec("helmholtz.x0", Vec3::Zero());
    const double omega = positive(sc, "helmholtz.omega");
    HelmholtzProblem p{f, omega, g, x0, build_absorber(ctx, "helmholtz"), ctx.c,
                       sc.number("helmholtz.source_radius", 0.0)};
    const SpectralKernel sol = solve_helmholtz(p);
    write_kernel_file(ctx.rec->file("helmholtz.bin").string(), sol.psi);
    if (sc.boolean("helmholtz.csv", false)) write_kernel_csv(ctx.rec->file("helmholtz.csv").string(), sol.psi);
    nlohmann::json summary = {{"residual", residual_json(fd_residual(p, sol.psi))}};
    if (sc.has("helmholtz.probes")) {
        const auto n = f.constant_index();
        if (!n || f.dim() == 2) sc.fail("helmholtz.probes", "analytic probes need a homogeneous 1D or 3D medium");
        const double k = *n * omega / ctx.c;
        nlohmann::json probes = nlohmann::json::array();
        ProperTimeOptions po;
        po.c = ctx.c;
        for (const Vec3& x : sc.vecs("helmholtz.probes")) {
            const auto idx = g.nearest(x);
            const cdouble fd = sol.psi.values[g.flatten(idx)];
            probes.push_back({{"x", vec_json(x, f.dim())},
                              {"analytic", cjson(analytic_green(x, x0, k, f.dim()))},
                              {"proper_time", cjson(proper_time_integral(f, x, x0, omega, po).extrapolated)},
                              {"finite_difference", cjson(fd)}});
        }
        summary["probes"] = probes;
    }
    if (sc.boolean("helmholtz.compare_stationary", false)) {
        StationaryOptions so;
        so.c = ctx.c;
        so.absorber = p.absorber;
        const SpectralKernel sk = stationary_kernel(f, x0, omega, g, so);
        const double r0 = p.source_radius > 0 ? p.source_radius : 4.0 * g.h;
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            const Vec3 x = g.node(i);
            if ((x - x0).norm() < r0 || p.absorber.inside(g, x)) continue;
            num += std::norm(sol.psi.values[i] - sk.psi.values[i]);
            den += std::norm(sol.psi.values[i]);
        }
        summary["relative_l2_vs_stationary"] = std::sqrt(num / den);
    }
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "helmholtz: residual max " << summary["residual"]["max"].get<double>() << '\n';
}

void run_synth(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    const IndexField f = build_medium(ctx);
    const GridSpec g = build_grid(ctx, "synth", f.dim());
    const Vec3 x0 = sc.vec("synth.x0", Vec3::Zero());
    const std::vector<Vec3> probes = sc.vecs("synth.probes");
    const double omega0 = positive(sc, "synth.spectrum.omega0");
    const double sigma = positive(sc, "synth.spectrum.sigma");
    const double width = positive(sc, "synth.spectrum.width", 4.0);
    FrequencySpectrum spec;
    if (sc.has("synth.spectrum.d_omega")) {
        spec = FrequencySpectrum::gaussian(omega0, sigma, positive(sc, "synth.spectrum.d_omega"), width);
    } else {
        spec = FrequencySpectrum::gaussian_for(omega0, sigma, positive(sc, "synth.spectrum.longest_time"), width);
    }
    std::vector<double> t;
    const long count = sc.integer("synth.times.count", 512);
    if (count < 2) sc.fail("synth.times.count", "need at least 2 time samples");
    if (sc.has("synth.times.dt")) {
        t = uniform_times(sc.number("synth.times.t0", 0.0), positive(sc, "synth.times.dt"), static_cast<size_t>(count));
    } else {
        t = periodic_times(spec, static_cast<size_t>(count));
    }
    const double threshold = sc.number("synth.threshold", 0.5);

    std::vector<size_t> nodes;
    for (size_t j = 0; j < probes.size(); ++j) {
        bool exact = false;
        const auto idx = g.nearest(probes[j], &exact);
        for (int a = 0; a < g.dim; ++a)
            if (idx[a] < 0 || idx[a] >= g.n[a]) sc.fail("synth.probes", "probe lies off the grid");
        nodes.push_back(g.flatten(idx));
    }

    std::vector<ComplexGrid> kernels;
    kernels.reserve(spec.size());
    const bool analytic = f.constant_index() && build_absorber(ctx, "synth").width <= 0.0;
    for (size_t k = 0; k < spec.size(); ++k) {
        if (analytic) {
            ComplexGrid kg(g);
            ProperTimeOptions po;
            po.c = ctx.c;
            for (size_t node : nodes) kg.values[node] = proper_time_integral(f, g.node(node), x0, spec.omega[k], po).extrapolated;
            kernels.push_back(std::move(kg));
        } else {
            kernels.push_back(stationary_kernel(f, x0, spec.omega[k], g, stationary_options(ctx, "synth.stationary")).psi);
        }
    }
    const TimeKernel tk = synthesize_time(kernels, spec, t, nodes);
    write_time_kernel_file(ctx.rec->file("time_kernel.bin").string(), tk);

    const double dt = t.size() > 1 ? t[1] - t[0] : 0.0;
    const bool fermat = sc.boolean("synth.fermat", true) && !f.dispersive();
    nlohmann::json rows = nlohmann::json::array();
    for (size_t j = 0; j < probes.size(); ++j) {
        const std::string name = "trace_" + std::to_string(j) + ".csv";
        const Vec3 x = g.node(nodes[j]);
        write_time_trace_csv(ctx.rec->file(name).string(), t, tk.trace(x));
        nlohmann::json row = {{"probe", vec_json(x, f.dim())}, {"file", name}};
        try {
            row["arrival"] = front_arrival(tk, x, threshold);
        } catch (const NoSignalError& e) {
            row["arrival"] = nullptr;
            row["note"] = e.what();
        }
        if (fermat && (x - x0).norm() > 0) {
            ConnectOptions co;
            co.c = ctx.c;
            const double ds = positive(sc, "synth.ray_ds", 1e-3 * (x - x0).norm() + 1e-12);
            const double T = optical_time(connect(f, x0, x, ds, co));
            row["fermat_time"] = T;
            row["budget"] = 2.0 * dt + envelope_lead(sigma, threshold);
            if (!row["arrival"].is_null()) row["difference"] = row["arrival"].get<double>() - T;
        }
        rows.push_back(row);
    }
    nlohmann::json summary = {{"frequencies", spec.size()},
                              {"d_omega", spec.d_omega},
                              {"dt", dt},
                              {"probes", rows}};
    ctx.rec->write_json("summary.json", summary);
    *ctx.out << "synth: " << spec.size() << " frequencies, " << probes.size() << " probes\n";
}

void run_zeta(Context& ctx) {
    const Scenario& sc = *ctx.sc;
    std::vector<PowerSpectrumOperator> ops;
    if (sc.has("zeta.operators")) {
        for (const auto& el : sc.root()["zeta"]["operators"]) {
            if (!el.is_object() || !el.contains("a") || !el.contains("x") || !el["a"].is_number() || !el["x"].is_number())
                sc.fail("zeta.operators", "each operator needs numeric a and x");
            ops.push_back({el["a"].get<double>(), el["x"].get<double>()});
        }
    } else {
        const double pi = M_PI;
        for (double T : {0.5, 1.0, 3.0, 10.0}) ops.push_back({(pi / T) * (pi / T), 2.0});
    }
    std::vector<double> Ts = sc.has("zeta.T") ? sc.numbers("zeta.T") : std::vector<double>{0.5, 1.0, 3.0, 10.0};
    const long random_T = sc.integer("zeta.random_T", 0);
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    for (long i = 0; i < random_T; ++i) {
        double T = 0.0;
        while (!(T > 0)) T = uni(rng);
        Ts.push_back(T);
    }
    const long N = sc.integer("zeta.partial_N", 100);

    std::ofstream csv(ctx.rec->file("zeta.csv"));
    csv.precision(17);
    csv << "a,x,det,log_partial_product_N\n";
    for (const PowerSpectrumOperator& op : ops) {
        try {
            csv << op.a << ',' << op.x << ',' << regularized_det(op) << ',' << log_partial_product(op, N) << '\n';
        } catch (const UsageError& e) {
            sc.fail("zeta.operators", e.what());
        }
    }
    const ZetaConstants z = zeta_constants();
    nlohmann::json fp = nlohmann::json::array();
    for (double T : Ts) fp.push_back({{"T", T}, {"det", fp_determinant(T)}});
    ctx.rec->write_json("summary.json", {{"zeta0", z.zeta0}, {"zeta_prime0", z.zeta_prime0}, {"fp_determinant", fp}});
    for (const PowerSpectrumOperator& op : ops) *ctx.out << op.a << ',' << op.x << ',' << regularized_det(op) << '\n';
}

int run_verify(Context& ctx) {
    AcceptanceOptions o;
    o.seed = ctx.seed;
    o.threads = thread_count();
    o.criteria = ctx.criteria;
    if (o.criteria.empty() && ctx.sc && ctx.sc->has("verify.criteria")) {
        for (double v : ctx.sc->numbers("verify.criteria")) o.criteria.push_back(static_cast<int>(v));
    }
    // criterion 10 runs verify itself; nested runs never include it
    o.scratch_dir = (ctx.rec->dir() / "scratch").string();
    o.on_result = [&](const CriterionResult& r) { *ctx.out << format_result(r) << std::endl; };
    const std::vector<CriterionResult> results = run_acceptance(o);
    fs::remove_all(o.scratch_dir);
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const CriterionResult& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"values", r.values}});
        all = all && r.pass;
    }
    ctx.rec->write_json("results.json", arr);
    return all ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& run_kinds() {
    static const std::vector<std::string> kinds = {"trace", "connect", "minimize", "kernel", "stationary",
                                                   "helmholtz", "synth", "zeta", "verify"};
    return kinds;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fermat-principle optics: rays, path integrals and Helmholtz kernels"};
    app.name("fermat");
    std::string scenario_path;
    std::string out_root = "runs";
    int threads = 0;
    std::uint64_t seed = 0;
    double c = 1.0;
    std::vector<int> criteria;
    app.add_option("--scenario", scenario_path, "scenario file (TOML or JSON)");
    app.add_option("--out", out_root, "output root; each run writes a fresh timestamped directory below it");
    app.add_option("--threads", threads, "worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "seed for randomized parts");
    app.add_option("--c", c, "speed of light (default 1)")->check(CLI::PositiveNumber);
    app.add_option("--criteria", criteria, "verify: subset of acceptance criteria to run");
    app.require_subcommand(1, 1);
    app.fallthrough();
    const std::map<std::string, std::string> help = {
        {"trace", "integrate a ray from a launch state"},
        {"connect", "two-point ray by shooting"},
        {"minimize", "minimize the discrete Fermat time over polylines"},
        {"kernel", "time-sliced Schroedinger kernel at proper time S"},
        {"stationary", "fixed-frequency kernel on a grid"},
        {"helmholtz", "direct finite-difference Helmholtz solve"},
        {"synth", "time-domain synthesis and front arrival"},
        {"zeta", "zeta-regularized determinants"},
        {"verify", "run the acceptance suite"}};
    for (const std::string& k : run_kinds()) app.add_subcommand(k, help.at(k))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "fermat: " << e.what() << '\n';
        return 2;
    }
    const std::string kind = app.get_subcommands().front()->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::optional<Scenario> sc;
        if (!scenario_path.empty()) {
            sc = Scenario::load(scenario_path);
        } else if (kind == "zeta" || kind == "verify") {
            sc = Scenario::from_text("", "<defaults>", false);
        } else {
            err << "fermat " << kind << ": --scenario is required\n";
            return 2;
        }
        sc->validate(schema_for(kind));
        if (sc->has("kind") && sc->string("kind") != kind)
            sc->fail("kind", "scenario is for '" + sc->string("kind") + "', not '" + kind + "'");

        Context ctx;
        ctx.sc = &*sc;
        ctx.scenario_dir = scenario_path.empty() ? fs::current_path() : fs::absolute(scenario_path).parent_path();
        ctx.seed = app.count("--seed") ? seed : static_cast<std::uint64_t>(sc->integer("seed", 0));
        ctx.c = app.count("--c") ? c : sc->number("c", 1.0);
        if (!(ctx.c > 0)) sc->fail("c", "must be positive");
        ctx.criteria = criteria;
        int nthreads = app.count("--threads") ? threads : static_cast<int>(sc->integer("threads", 0));
        if (nthreads <= 0) nthreads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        set_thread_count(nthreads);

        RunRecord rec(make_run_dir(out_root, kind));
        ctx.rec = &rec;
        ctx.out = &out;
        int status = 0;
        if (kind == "trace") run_trace(ctx);
        else if (kind == "connect") run_connect(ctx);
        else if (kind == "minimize") run_minimize(ctx);
        else if (kind == "kernel") run_kernel(ctx);
        else if (kind == "stationary") run_stationary(ctx);
        else if (kind == "helmholtz") run_helmholtz(ctx);
        else if (kind == "synth") run_synth(ctx);
        else if (kind == "zeta") run_zeta(ctx);
        else status = run_verify(ctx);

        const nlohmann::json params = {{"scenario", sc->root()}, {"seed", ctx.seed}, {"c", ctx.c}};
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.write_manifest(kind, params, wall);
        out << "run directory: " << rec.dir().string() << '\n';
        return status;
    } catch (const ScenarioError& e) {
        err << "fermat " << kind << ": " << e.what() << '\n';
        return 2;
    } catch (const fermat::Error& e) {
        err << "fermat " << kind << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "fermat " << kind << ": " << e.what() << '\n';
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("fermat");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fermat::cli
