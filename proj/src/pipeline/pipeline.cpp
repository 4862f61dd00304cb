#include "pipeline.hpp"

#include "verify.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlsdist {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

json estimate_json(const NormEstimate& e)
{
    return {{"value", e.value}, {"error", e.error}, {"tail", std::isfinite(e.tail) ? json(e.tail) : json(nullptr)}};
}

// collects written files for the manifest; writes are serialized through here
class Outputs {
public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) { ensure_directory(dir_); }

    void write(const std::string& rel, const std::string& bytes)
    {
        fs::path p = fs::path(dir_) / rel;
        if (p.has_parent_path()) ensure_directory(p.parent_path().string());
        write_text_file(p.string(), bytes);
        files_.push_back({{"path", rel}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }
    void write_json(const std::string& rel, const json& j) { write(rel, j.dump(2) + "\n"); }
    // path for a file written by someone else; register it afterwards with add()
    std::string path(const std::string& rel) const
    {
        fs::path p = fs::path(dir_) / rel;
        if (p.has_parent_path()) ensure_directory(p.parent_path().string());
        return p.string();
    }
    void add(const std::string& rel)
    {
        std::string p = path(rel);
        files_.push_back({{"path", rel}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    const json& files() const { return files_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    json files_ = json::array();
};

struct Context {
    Config cfg;
    CommandOptions opt;
    std::string name;
    json inputs = json::array();
    json timing = json::object();
    clock_type::time_point start = clock_type::now();

    void log(const std::string& s) const
    {
        if (opt.log) opt.log(s);
    }
};

void write_manifest(Context& cx, Outputs& out, const json& extra, const json& verification = nullptr)
{
    cx.timing["total_s"] = seconds_since(cx.start);
    json m;
    m["tool_version"] = NLSDIST_VERSION;
    m["command"] = cx.name;
    m["command_line"] = cx.opt.command_line;
    m["config_hash"] = config_hash(cx.cfg);
    m["seed"] = cx.cfg.seed;
    m["input_paths"] = cx.inputs;
    m["output_paths"] = out.files();
    m["timing"] = cx.timing;
    m["verification_summary"] = verification;
    for (auto& [k, v] : extra.items()) m[k] = v;
    // the manifest itself is not listed among its outputs
    write_text_file(out.path("manifest.json"), m.dump(2) + "\n");
}

rvec staggered(double dk, double k_max)
{
    rvec k;
    for (std::size_t j = 0; (double(j) + 0.5) * dk <= k_max * (1.0 + 1e-12); ++j) k.push_back((double(j) + 0.5) * dk);
    return k;
}

std::string conserved_csv(const Trajectory& tr, const rvec& V, double h, json* table)
{
    CsvWriter w({"t", "mass", "hamiltonian", "hamiltonian_plus_quarter", "kinetic", "potential", "quartic", "sup_u"});
    for (const auto& s : tr.snapshots) {
        Conserved c = conserved_quantities(s, V, h);
        double sup = 0.0;
        for (auto v : s.u) sup = std::max(sup, std::abs(v));
        w.row({s.t, c.mass, c.hamiltonian, c.hamiltonian_alt, c.kinetic, c.potential, c.quartic, sup});
        if (table) table->push_back({{"t", s.t}, {"mass", c.mass}, {"hamiltonian", c.hamiltonian}});
    }
    return w.str();
}

std::string profiles_csv(const ModifiedProfile& mp, const ProfileHistory& ph)
{
    CsvWriter w({"t", "k", "re_W", "im_W", "abs_Z"});
    for (std::size_t it = 0; it < mp.times.size(); ++it) {
        for (std::size_t jj = ph.nk(); jj-- > 0;)
            w.row({mp.times[it], -ph.k[jj], mp.W[it][jj][1].real(), mp.W[it][jj][1].imag(), std::abs(ph.Z[it][jj][1])});
        for (std::size_t j = 0; j < ph.nk(); ++j)
            w.row({mp.times[it], ph.k[j], mp.W[it][j][0].real(), mp.W[it][j][0].imag(), std::abs(ph.Z[it][j][0])});
    }
    return w.str();
}

std::optional<std::size_t> nearest_time(const rvec& times, double t, double tol)
{
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= tol) return i;
    return std::nullopt;
}

// ---- scatter ----
void cmd_scatter(Context& cx)
{
    const Config& c = cx.cfg;
    Outputs out(cx.opt.out_dir);
    rvec V = sample_potential(c.potential);
    HypothesisReport hr = hypothesis_report(c.potential, V);

    auto t0 = clock_type::now();
    JostOptions jo;
    jo.derivative_order = c.scatter.derivative_order;
    jo.romberg_levels = c.scatter.romberg_levels;
    jo.store_stride = c.scatter.write_jost ? c.scatter.jost_stride : 0;
    rvec k = staggered(c.scatter.dk, c.scatter.k_max);
    JostField f = solve_m(c.potential, c.potential.grid, k, JostSide::both, jo);
    ScatteringData sd = compute_TR(f);
    cx.timing["jost_s"] = seconds_since(t0);

    std::string csv = scattering_csv(sd);
    out.write("scattering.csv", csv);
    json summary;
    summary["potential"] = potential_to_json(c.potential);
    summary["n_k"] = sd.size();
    summary["dk"] = c.scatter.dk;
    summary["max_unitarity_defect"] = sd.max_unitarity_defect();
    summary["max_inverse_T_mismatch"] = sd.max_inv_T_mismatch();
    if (!c.potential.is_zero() && sd.size() >= 3) summary["genericity"] = genericity_json(genericity_report(f, sd));
    summary["hypothesis"] = hypothesis_json(hr);
    out.write_json("scatter_summary.json", summary);
    if (c.scatter.write_jost) {
        write_jost_field(out.path("jost.bin"), f, {{"potential", potential_to_json(c.potential)}});
        out.add("jost.bin");
    }
    write_manifest(cx, out, {{"scattering_sha256", sha256_hex(csv)}});
    cx.log("scatter: " + std::to_string(sd.size()) + " k values, max unitarity defect " +
           fmt(sd.max_unitarity_defect()));
    bool strict = c.strict || cx.opt.strict;
    if (strict && !hr.full_compliance()) {
        std::string v;
        for (const auto& s : hr.violations) v += (v.empty() ? "" : "; ") + s;
        fail(ErrorKind::hypothesis, "hypothesis report: " + v);
    }
}

// ---- basis ----
void cmd_basis(Context& cx)
{
    const Config& c = cx.cfg;
    Outputs out(cx.opt.out_dir);
    auto t0 = clock_type::now();
    std::optional<DistortedBasis> basis;
    JostField window;
    if (c.potential.is_zero()) {
        basis.emplace(DistortedBasis::flat(c.x_grid, c.basis));
    } else {
        WindowPlan w = plan_window(c.potential, c.x_grid, c.basis);
        JostOptions jo;
        jo.derivative_order = 0;
        jo.romberg_levels = c.basis.romberg_levels;
        jo.store_stride = w.refine;
        window = solve_m(c.potential, w.solve_grid, w.k, JostSide::both, jo);
        window.x_grid = {c.x_grid.at(w.w0), c.x_grid.at(w.w1), w.w1 - w.w0 + 1};
        ScatteringData sd = compute_TR(window);
        basis.emplace(build_basis(c.x_grid, window, sd, c.basis));
    }
    cx.timing["build_s"] = seconds_since(t0);
    const DistortedBasis& b = *basis;

    std::string csv = scattering_csv(b.scattering());
    out.write("basis_scattering.csv", csv);
    json header{{"kind", "distorted-basis"},
                {"scattering_sha256", sha256_hex(csv)},
                {"propagation_grid", grid_json(c.x_grid)},
                {"oversample", c.basis.oversample},
                {"k_cut", std::isfinite(c.basis.k_cut) ? json(c.basis.k_cut) : json(nullptr)},
                {"fft_size", b.fft_size()},
                {"dk", b.k_weight()},
                {"window", b.has_window() ? json{b.window_begin(), b.window_end()} : json(nullptr)}};
    if (!b.has_window()) {
        window.x_grid = c.x_grid;
        window.solve_grid = c.x_grid;
    }
    write_jost_field(out.path("basis.bin"), window, header);
    out.add("basis.bin");

    // self-checks on the propagation grid
    rvec V = sample_on(c.potential, c.x_grid);
    cvec f(c.x_grid.n), g(c.x_grid.n);
    for (std::size_t i = 0; i < c.x_grid.n; ++i) {
        double x = c.x_grid.at(i);
        f[i] = std::exp(-x * x);
        g[i] = x * std::exp(-x * x);
    }
    DistortedSpectrum s = b.forward(f);
    cvec back = b.inverse(s);
    double nf = l2_norm(f, b.x_weight());
    for (std::size_t i = 0; i < back.size(); ++i) back[i] -= f[i];
    json summary{{"fft_size", b.fft_size()},
                 {"band_k_max", b.k_band_max()},
                 {"dk", b.k_weight()},
                 {"propagation_resolved", propagation_resolved(b, c.run.t_max)},
                 {"parseval_defect", std::abs(l2_norm(s.values, b.k_weight()) - nf) / nf},
                 {"roundtrip_error", l2_norm(back, b.x_weight()) / nf},
                 {"diagonalization_residual", diagonalization_residual(g, b, V)}};
    if (b.has_window()) {
        // decomposition identity at a few sample nodes
        double dec = 0.0;
        for (std::size_t n = b.window_begin(); n <= b.window_end(); n += 7)
            for (std::size_t idx = 0; idx < b.k_grid().size(); idx += 97)
                if (b.in_band(idx))
                    dec = std::max(dec, std::abs(sqrt_2pi * b.psi(n, idx) -
                                                 (b.psi_S(n, idx) + b.psi_L(n, idx) + b.psi_R(n, idx))));
        summary["decomposition_defect"] = dec;
    }
    out.write_json("basis_summary.json", summary);
    write_manifest(cx, out, {{"scattering_sha256", sha256_hex(csv)}});
    cx.log("basis: fft size " + std::to_string(b.fft_size()) + ", band |k| <= " + fmt(b.k_band_max()));
}

struct RunProducts {
    std::optional<DistortedBasis> basis;
    rvec V;
    Trajectory tr;
};

RunProducts run_dynamics(Context& cx, bool keep_spectra)
{
    const Config& c = cx.cfg;
    RunProducts p;
    auto t0 = clock_type::now();
    p.basis.emplace(make_basis(c.potential, c.x_grid, c.basis));
    cx.timing["basis_s"] = seconds_since(t0);
    p.V = sample_on(c.potential, c.x_grid);
    RunConfig r = c.run;
    r.epsilon0 = c.data.epsilon0;
    r.snapshot_times = snapshot_times(c.snapshots, c.run.t_max);
    r.keep_spectra = keep_spectra;
    t0 = clock_type::now();
    p.tr = evolve(initial_data(c.data, c.x_grid), r, *p.basis, p.V);
    cx.timing["evolve_s"] = seconds_since(t0);
    for (const auto& w : p.tr.warnings) cx.log("warning: " + w);
    return p;
}

// ---- evolve ----
void cmd_evolve(Context& cx)
{
    const Config& c = cx.cfg;
    Outputs out(cx.opt.out_dir);
    RunProducts p = run_dynamics(cx, false);
    json table = json::array();
    out.write("conserved.csv", conserved_csv(p.tr, p.V, c.x_grid.step(), &table));
    json snaps = json::array();
    for (std::size_t i = 0; i < p.tr.snapshots.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "snapshots/u_%04zu.bin", i);
        write_field(out.path(name), p.tr.snapshots[i], c.x_grid);
        out.add(name);
        snaps.push_back({{"t", p.tr.snapshots[i].t}, {"path", name}});
    }
    json traj{{"scheme", scheme_name(c.run.scheme)}, {"steps", p.tr.steps}, {"snapshots", snaps},
              {"warnings", p.tr.warnings}};
    double t_lo = c.verify.decay_t_lo, t_hi = c.run.t_max;
    try {
        DecayFit fit = decay_fit(p.tr, c.x_grid, t_lo, t_hi);
        traj["decay_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"t_lo", fit.t_lo},
                             {"t_hi", fit.t_hi}, {"points", fit.points}};
    } catch (const Error& e) {
        traj["decay_fit"] = {{"error", e.what()}};
    }
    out.write_json("trajectory.json", traj);
    write_manifest(cx, out, {{"scheme", scheme_name(c.run.scheme)}, {"conserved_quantities", table}});
    cx.log("evolve: " + std::to_string(p.tr.snapshots.size()) + " snapshots to t = " + fmt(c.run.t_max));
}

// ---- asymptotics ----
void cmd_asymptotics(Context& cx)
{
    const Config& c = cx.cfg;
    const auto& as = c.asymptotics;
    Outputs out(cx.opt.out_dir);
    RunProducts p = run_dynamics(cx, true);
    const DistortedBasis& b = *p.basis;
    auto t0 = clock_type::now();
    ProfileHistory ph = extract_profiles(p.tr, b);
    ModifiedProfile mp = correct_plus(ph, as.kappa);
    Trajectory back = time_reversed(p.tr, b);
    ProfileHistory phm = extract_profiles(back, b);
    MinusOptions mo;
    mo.kappa = as.kappa;
    mo.rho = as.rho;
    ModifiedProfile mm = correct_minus(phm, b.scattering(), mo);
    out.write("profiles_plus.csv", profiles_csv(mp, ph));
    out.write("profiles_minus.csv", profiles_csv(mm, phm));

    double kr = retained_k_max(c.x_grid, c.run.absorber_width, c.run.t_max);
    double tol = 0.5 * c.run.dt;
    json summary;
    summary["kappa"] = as.kappa;
    summary["alpha"] = as.alpha;
    summary["rho"] = as.rho;
    summary["k_retained"] = kr;
    summary["threshold_rule"] = "S = S0 where k <= |t|^-rho, evaluated at every snapshot time";
    summary["constants"] = {{"p0", as.p0}, {"epsilon1_exponent", as.epsilon1_exponent}};
    summary["modulus_defect"] = {{"plus", mp.max_modulus_defect}, {"minus", mm.max_modulus_defect},
                                 {"minus_unitarity", mm.max_unitarity_defect}};

    // Cauchy differences over dyadic pairs inside the run
    json cauchy = json::array();
    for (double t = 25.0; 2.0 * t <= c.run.t_max * (1.0 + 1e-12); t *= 2.0) {
        if (!nearest_time(ph.times, t, tol) || !nearest_time(ph.times, 2.0 * t, tol)) continue;
        cauchy.push_back({{"t", t},
                          {"plus", cauchy_difference(mp, t, 2.0 * t, kr)},
                          {"minus", cauchy_difference(mm, -t, -2.0 * t, kr)}});
    }
    summary["cauchy_differences"] = cauchy;

    // log-phase law at the peak of |f~(t_max)|
    std::size_t iend = ph.nt() - 1, js = 0;
    int cs = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < ph.nk() && ph.k[j] <= kr; ++j)
        for (int q = 0; q < 2; ++q)
            if (std::abs(ph.Z[iend][j][q]) > best) {
                best = std::abs(ph.Z[iend][j][q]);
                js = j;
                cs = q;
            }
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0, prev = 0.0, unwrap = 0.0;
        bool first = true;
        for (std::size_t it = 0; it < ph.nt(); ++it) {
            double t = ph.times[it];
            if (t < as.t_min_asymptotic) continue;
            double a = std::arg(ph.Z[it][js][cs]);
            if (!first) {
                double d = a - prev;
                unwrap += d - 2.0 * pi * std::round(d / (2.0 * pi));
            }
            prev = a;
            first = false;
            double lx = std::log(t);
            sx += lx;
            sy += unwrap;
            sxx += lx * lx;
            sxy += lx * unwrap;
            n += 1;
        }
        double slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
        summary["log_phase"] = {{"k", cs == 0 ? ph.k[js] : -ph.k[js]},
                                {"fitted_slope", slope},
                                {"predicted_slope", -as.kappa * best * best},
                                {"points", n}};
    }

    // reduced ODE against the PDE at t_max
    json ode = json::array();
    {
        std::size_t nk = 0;
        while (nk < ph.nk() && ph.k[nk] <= kr) ++nk;
        rvec k(ph.k.begin(), ph.k.begin() + long(nk));
        double tend = c.run.t_max;
        std::vector<double> seeds;
        for (double s : as.ode_seeds)
            if (s >= 1.0 && s < tend && nearest_time(ph.times, s, tol)) seeds.push_back(s);
        if (!seeds.empty() && nk > 0) {
            OscillatoryTable table(*std::min_element(seeds.begin(), seeds.end()), tend, std::sqrt(tend) * kr + 1.0,
                                   {as.alpha, as.rho});
            ReducedOdeOptions ro;
            ro.dt = as.ode_dt;
            ro.kappa = as.kappa;
            for (double s : seeds) {
                std::size_t is = *nearest_time(ph.times, s, tol);
                std::vector<Vec2> z0(ph.Z[is].begin(), ph.Z[is].begin() + long(nk));
                auto res = reduced_ode_evolve(z0, k, b.scattering(), table, ph.times[is], {tend}, ro);
                double e = 0.0;
                for (std::size_t j = 0; j < nk; ++j)
                    for (int q = 0; q < 2; ++q) e = std::max(e, std::abs(res[0][j][q] - ph.Z[iend][j][q]));
                ode.push_back({{"seed", s}, {"mismatch", e}});
            }
        }
    }
    summary["reduced_ode"] = ode;

    // physical-space residual table on |x| <= x_max / 2
    json resid = json::array();
    {
        double half = 0.5 * std::min(-c.x_grid.x_min, c.x_grid.x_max);
        rvec xs;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < c.x_grid.n; ++i)
            if (std::abs(c.x_grid.at(i)) <= half) {
                xs.push_back(c.x_grid.at(i));
                ids.push_back(i);
            }
        for (double t : as.residual_times) {
            auto it = nearest_time(ph.times, t, tol);
            if (!it || t < as.t_min_asymptotic) continue;
            for (int sgn : {1, -1}) {
                const ProfileHistory& h = sgn > 0 ? ph : phm;
                const Trajectory& tr = sgn > 0 ? p.tr : back;
                cvec pred = physical_asymptotics(h, *it, b.scattering(), xs);
                double e = 0.0;
                for (std::size_t q = 0; q < xs.size(); ++q)
                    e = std::max(e, std::abs(tr.snapshots[*it].u[ids[q]] - pred[q]));
                resid.push_back({{"t", sgn * t},
                                 {"sup_residual", e},
                                 {"weighted", e * std::pow(t, as.residual_weight_exponent)}});
            }
        }
    }
    summary["physical_residuals"] = resid;
    cx.timing["asymptotics_s"] = seconds_since(t0);
    out.write_json("asymptotics.json", summary);
    write_manifest(cx, out, {{"threshold_rule", summary["threshold_rule"]}});
    cx.log("asymptotics: " + std::to_string(ph.nt()) + " profiles, " + std::to_string(ph.nk()) + " k values");
}

// ---- verify ----
void cmd_verify(Context& cx)
{
    Outputs out(cx.opt.out_dir);
    json times = json::object();
    VerifyReport rep = run_verification(cx.cfg, cx.opt.filter, [&](const CriterionResult& r) {
        times[r.name] = r.seconds;
        cx.log(format_result_line(r));
    });
    cx.timing["criteria_s"] = times;
    out.write_json("verify.json", rep.to_json());
    json fails = rep.failed_ids();
    json vs{{"passed", rep.results.size() - fails.size()}, {"failed", fails.size()}, {"failed_ids", fails}};
    write_manifest(cx, out, json::object(), vs);
    if (!rep.all_passed()) {
        std::string ids;
        for (int id : rep.failed_ids()) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
        fail(ErrorKind::verification, "verification failed for criteria " + ids);
    }
}

} // namespace

json hypothesis_json(const HypothesisReport& h)
{
    json mom = json::object();
    for (const auto& [s, e] : h.moments) mom[std::to_string(s)] = estimate_json(e);
    return {{"gamma", h.gamma},
            {"l1_gamma_norm", estimate_json(h.l1_gamma)},
            {"moments", mom},
            {"w21_norm_estimate", estimate_json(h.w21)},
            {"w21_finite", h.w21_finite},
            {"positivity", h.positivity},
            {"gamma_main", h.gamma_main},
            {"gamma_lemcoeff", h.gamma_lemcoeff},
            {"gamma_isometry", h.gamma_isometry},
            {"violations", h.violations}};
}

json genericity_json(const GenericityReport& g)
{
    auto c = [](cplx v) { return json{v.real(), v.imag()}; };
    return {{"integral_at_zero", c(g.integral_at_zero)},
            {"integral_error", g.integral_error},
            {"T_slope_at_zero", c(g.T_slope_at_zero)},
            {"k_min", g.k_min},
            {"T_at_k_min", c(g.T_at_k_min)},
            {"R_plus_at_k_min", c(g.R_plus_at_k_min)},
            {"R_minus_at_k_min", c(g.R_minus_at_k_min)},
            {"is_generic", g.is_generic},
            {"inconclusive", g.inconclusive}};
}

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::hypothesis: return 2;
    case ErrorKind::verification: return 3;
    default: return 1;
    }
}

std::vector<std::string> check_manifest(const std::string& out_dir)
{
    json m = json::parse(read_text_file((fs::path(out_dir) / "manifest.json").string()));
    std::vector<std::string> bad;
    for (const auto& f : m.at("output_paths")) {
        std::string rel = f.at("path").get<std::string>();
        fs::path p = fs::path(out_dir) / rel;
        if (!fs::exists(p) || sha256_file(p.string()) != f.at("sha256").get<std::string>()) bad.push_back(rel);
    }
    return bad;
}

void run_command(const std::string& name, const CommandOptions& opt)
{
    static const char* names[] = {"scatter", "basis", "evolve", "asymptotics", "verify"};
    if (std::find(std::begin(names), std::end(names), name) == std::end(names))
        fail(ErrorKind::invalid_argument, "unknown command '" + name + "'");
    Context cx;
    cx.opt = opt;
    cx.name = name;
    if (!opt.config_path.empty()) {
        cx.cfg = load_config(opt.config_path);
        cx.inputs.push_back({{"path", opt.config_path}, {"sha256", sha256_file(opt.config_path)}});
    }
    if (opt.seed) cx.cfg.seed = *opt.seed;
    if (opt.threads) cx.cfg.threads = *opt.threads;
    if (opt.strict) cx.cfg.strict = true;
#ifdef _OPENMP
    if (cx.cfg.threads > 0) omp_set_num_threads(cx.cfg.threads);
#endif
    ensure_directory(opt.out_dir);
    write_text_file((fs::path(opt.out_dir) / "config.resolved.json").string(), config_to_json(cx.cfg).dump(2) + "\n");

    if (name == "scatter") cmd_scatter(cx);
    else if (name == "basis") cmd_basis(cx);
    else if (name == "evolve") cmd_evolve(cx);
    else if (name == "asymptotics") cmd_asymptotics(cx);
    else cmd_verify(cx);
}

} // namespace nlsdist
