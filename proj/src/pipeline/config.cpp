#include "config.hpp"

#include <algorithm>
#include <set>

namespace nlsdist {

Config::Config()
{
    potential.family = PotentialFamily::gaussian_barrier;
    potential.amplitude = 1.0;
    potential.width = 1.0;
    basis.k_cut = 6.0;
    run.snapshot_times.clear();
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) fail(ErrorKind::invalid_argument, "config: '" + where + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto& [k, _] : j.items())
        if (!ok.count(k)) fail(ErrorKind::invalid_argument, "config: unknown key '" + where + "." + k + "'");
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::invalid_argument, "config: '" + where + "." + key + "' has the wrong type");
    }
}

void get_grid(const json& j, UniformGrid& g, const std::string& where)
{
    check_keys(j, where, {"x_min", "x_max", "n_x"});
    get(j, "x_min", g.x_min, where);
    get(j, "x_max", g.x_max, where);
    get(j, "n_x", g.n, where);
}

} // namespace

json potential_to_json(const PotentialSpec& p)
{
    json params;
    if (p.family == PotentialFamily::square_barrier)
        params = {{"amplitude", p.amplitude}, {"half_width", p.width}};
    else if (p.family != PotentialFamily::custom_samples)
        params = {{"amplitude", p.amplitude}, {"width", p.width}};
    else
        params = json::object();
    json j{{"family", family_name(p.family)}, {"params", params}, {"gamma", p.gamma}, {"grid", grid_json(p.grid)}};
    if (p.family == PotentialFamily::custom_samples) j["samples"] = p.samples;
    return j;
}

PotentialSpec potential_from_json(const json& j)
{
    check_keys(j, "potential", {"family", "params", "gamma", "grid", "samples"});
    PotentialSpec p;
    std::string fam = family_name(p.family);
    get(j, "family", fam, "potential");
    p.family = family_from_name(fam);
    if (j.contains("params")) {
        const json& q = j.at("params");
        check_keys(q, "potential.params", {"amplitude", "width", "half_width"});
        get(q, "amplitude", p.amplitude, "potential.params");
        get(q, "width", p.width, "potential.params");
        get(q, "half_width", p.width, "potential.params");
    }
    get(j, "gamma", p.gamma, "potential");
    if (j.contains("grid")) get_grid(j.at("grid"), p.grid, "potential.grid");
    if (j.contains("samples")) {
        for (const auto& v : j.at("samples")) {
            if (!v.is_number()) fail(ErrorKind::invalid_argument, "config: potential.samples must be numbers");
            p.samples.push_back(v.get<double>());
        }
    }
    p.validate();
    return p;
}

Config config_from_json(const json& j)
{
    Config c;
    check_keys(j, "config", {"potential", "scatter", "basis", "data", "run", "asymptotics", "verify", "seed",
                             "threads", "strict"});
    if (j.contains("potential")) c.potential = potential_from_json(j.at("potential"));
    if (j.contains("scatter")) {
        const json& s = j.at("scatter");
        check_keys(s, "scatter", {"dk", "k_max", "derivative_order", "romberg_levels", "write_jost", "jost_stride"});
        get(s, "dk", c.scatter.dk, "scatter");
        get(s, "k_max", c.scatter.k_max, "scatter");
        get(s, "derivative_order", c.scatter.derivative_order, "scatter");
        get(s, "romberg_levels", c.scatter.romberg_levels, "scatter");
        get(s, "write_jost", c.scatter.write_jost, "scatter");
        get(s, "jost_stride", c.scatter.jost_stride, "scatter");
    }
    if (j.contains("basis")) {
        const json& b = j.at("basis");
        check_keys(b, "basis", {"grid", "oversample", "k_cut", "max_band_fraction", "romberg_levels"});
        if (b.contains("grid")) get_grid(b.at("grid"), c.x_grid, "basis.grid");
        get(b, "oversample", c.basis.oversample, "basis");
        if (b.contains("k_cut") && b.at("k_cut").is_null())
            c.basis.k_cut = std::numeric_limits<double>::infinity();
        else
            get(b, "k_cut", c.basis.k_cut, "basis");
        get(b, "max_band_fraction", c.basis.max_band_fraction, "basis");
        get(b, "romberg_levels", c.basis.romberg_levels, "basis");
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data", {"epsilon0", "sigma", "center"});
        get(d, "epsilon0", c.data.epsilon0, "data");
        get(d, "sigma", c.data.sigma, "data");
        get(d, "center", c.data.center, "data");
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        check_keys(r, "run", {"dt", "t_max", "scheme", "nonlinear", "snapshots", "absorber_width", "absorber_strength",
                              "blowup_factor"});
        get(r, "dt", c.run.dt, "run");
        get(r, "t_max", c.run.t_max, "run");
        if (r.contains("scheme")) {
            std::string s;
            get(r, "scheme", s, "run");
            c.run.scheme = scheme_from_name(s);
        }
        get(r, "nonlinear", c.run.nonlinear, "run");
        get(r, "absorber_width", c.run.absorber_width, "run");
        get(r, "absorber_strength", c.run.absorber_strength, "run");
        get(r, "blowup_factor", c.run.blowup_factor, "run");
        if (r.contains("snapshots")) {
            const json& s = r.at("snapshots");
            check_keys(s, "run.snapshots", {"t_min", "per_decade", "extra"});
            get(s, "t_min", c.snapshots.t_min, "run.snapshots");
            get(s, "per_decade", c.snapshots.per_decade, "run.snapshots");
            get(s, "extra", c.snapshots.extra, "run.snapshots");
        }
    }
    if (j.contains("asymptotics")) {
        const json& a = j.at("asymptotics");
        check_keys(a, "asymptotics", {"kappa", "alpha", "rho", "ode_dt", "ode_seeds", "t_min_asymptotic",
                                      "residual_times", "residual_weight_exponent", "p0", "epsilon1_exponent"});
        if (a.contains("kappa") && a.at("kappa").is_string()) {
            std::string k = a.at("kappa").get<std::string>();
            if (k == "unitary")
                c.asymptotics.kappa = kappa_unitary;
            else if (k == "published")
                c.asymptotics.kappa = kappa_published();
            else
                fail(ErrorKind::invalid_argument, "config: asymptotics.kappa must be a number, 'unitary' or 'published'");
        } else {
            get(a, "kappa", c.asymptotics.kappa, "asymptotics");
        }
        get(a, "alpha", c.asymptotics.alpha, "asymptotics");
        get(a, "rho", c.asymptotics.rho, "asymptotics");
        get(a, "ode_dt", c.asymptotics.ode_dt, "asymptotics");
        get(a, "ode_seeds", c.asymptotics.ode_seeds, "asymptotics");
        get(a, "t_min_asymptotic", c.asymptotics.t_min_asymptotic, "asymptotics");
        get(a, "residual_times", c.asymptotics.residual_times, "asymptotics");
        get(a, "residual_weight_exponent", c.asymptotics.residual_weight_exponent, "asymptotics");
        get(a, "p0", c.asymptotics.p0, "asymptotics");
        get(a, "epsilon1_exponent", c.asymptotics.epsilon1_exponent, "asymptotics");
    }
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        check_keys(v, "verify", {"conservation_dt", "conservation_t_max", "decay_t_lo"});
        get(v, "conservation_dt", c.verify.conservation_dt, "verify");
        get(v, "conservation_t_max", c.verify.conservation_t_max, "verify");
        get(v, "decay_t_lo", c.verify.decay_t_lo, "verify");
    }
    get(j, "seed", c.seed, "config");
    get(j, "threads", c.threads, "config");
    get(j, "strict", c.strict, "config");

    require(c.x_grid.n >= 16 && c.x_grid.x_min < 0.0 && c.x_grid.x_max > 0.0, "config: basis.grid is invalid");
    require(c.basis.oversample >= 1.0, "config: basis.oversample must be >= 1");
    require(c.basis.max_band_fraction > 0.0 && c.basis.max_band_fraction <= 1.0, "config: basis.max_band_fraction must be in (0, 1]");
    require(c.scatter.dk > 0.0 && c.scatter.k_max > c.scatter.dk, "config: scatter needs 0 < dk < k_max");
    require(c.scatter.derivative_order >= 0 && c.scatter.derivative_order <= 2,
            "config: scatter.derivative_order must be 0, 1 or 2");
    require(c.scatter.jost_stride >= 1, "config: scatter.jost_stride must be >= 1");
    require(c.run.dt > 0.0 && c.run.t_max > 0.0, "config: run.dt and run.t_max must be positive");
    require(c.data.sigma > 0.0 && c.data.epsilon0 >= 0.0, "config: data.sigma > 0 and data.epsilon0 >= 0 required");
    require(c.asymptotics.rho > 0.0 && c.asymptotics.rho < c.asymptotics.alpha / 10.0 && c.asymptotics.alpha < 0.25,
            "config: need 0 < rho < alpha/10 < 1/40");
    require(c.threads >= 0, "config: threads must be >= 0");
    return c;
}

json config_to_json(const Config& c)
{
    json j;
    j["potential"] = potential_to_json(c.potential);
    j["scatter"] = {{"dk", c.scatter.dk},
                    {"k_max", c.scatter.k_max},
                    {"derivative_order", c.scatter.derivative_order},
                    {"romberg_levels", c.scatter.romberg_levels},
                    {"write_jost", c.scatter.write_jost},
                    {"jost_stride", c.scatter.jost_stride}};
    j["basis"] = {{"grid", grid_json(c.x_grid)},
                  {"oversample", c.basis.oversample},
                  {"k_cut", std::isfinite(c.basis.k_cut) ? json(c.basis.k_cut) : json(nullptr)},
                  {"max_band_fraction", c.basis.max_band_fraction},
                  {"romberg_levels", c.basis.romberg_levels}};
    j["data"] = {{"epsilon0", c.data.epsilon0}, {"sigma", c.data.sigma}, {"center", c.data.center}};
    j["run"] = {{"dt", c.run.dt},
                {"t_max", c.run.t_max},
                {"scheme", scheme_name(c.run.scheme)},
                {"nonlinear", c.run.nonlinear},
                {"snapshots",
                 {{"t_min", c.snapshots.t_min}, {"per_decade", c.snapshots.per_decade}, {"extra", c.snapshots.extra}}},
                {"absorber_width", c.run.absorber_width},
                {"absorber_strength", c.run.absorber_strength},
                {"blowup_factor", c.run.blowup_factor}};
    const auto& a = c.asymptotics;
    j["asymptotics"] = {{"kappa", a.kappa},
                        {"alpha", a.alpha},
                        {"rho", a.rho},
                        {"ode_dt", a.ode_dt},
                        {"ode_seeds", a.ode_seeds},
                        {"t_min_asymptotic", a.t_min_asymptotic},
                        {"residual_times", a.residual_times},
                        {"residual_weight_exponent", a.residual_weight_exponent},
                        {"p0", a.p0},
                        {"epsilon1_exponent", a.epsilon1_exponent}};
    j["verify"] = {{"conservation_dt", c.verify.conservation_dt},
                   {"conservation_t_max", c.verify.conservation_t_max},
                   {"decay_t_lo", c.verify.decay_t_lo}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["strict"] = c.strict;
    return j;
}

Config load_config(const std::string& path)
{
    std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::io, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const Config& c)
{
    // nlohmann::json (std::map) sorts keys
    nlohmann::json sorted = nlohmann::json::parse(config_to_json(c).dump());
    return sha256_hex(sorted.dump());
}

rvec snapshot_times(const SnapshotSettings& s, double t_max)
{
    rvec t = geometric_times(s.t_min, t_max, s.per_decade);
    for (double e : s.extra)
        if (e >= 0.0 && e <= t_max) t.push_back(e);
    std::sort(t.begin(), t.end());
    rvec out;
    for (double v : t)
        if (out.empty() || v - out.back() > 1e-9 * std::max(1.0, v)) out.push_back(v);
    return out;
}

cvec initial_data(const DataSettings& d, const UniformGrid& x)
{
    cvec u(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        double s = (x.at(i) - d.center) / d.sigma;
        u[i] = d.epsilon0 * std::exp(-0.5 * s * s);
    }
    return u;
}

} // namespace nlsdist
