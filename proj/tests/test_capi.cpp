// Exercises the shared library through its C header only.

#include <nlsdist/nlsdist.h>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef NLSDIST_CONFIG_DIR
#error "NLSDIST_CONFIG_DIR must point at configs/"
#endif

namespace fs = std::filesystem;

namespace {

std::string config(const char* name) { return std::string(NLSDIST_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* name)
{
    fs::path d = fs::temp_directory_path() / "nlsdist_capi" / name;
    fs::remove_all(d);
    return d;
}

nlsdist_status run(const char* cmd, const std::string& cfg, const fs::path& out, int strict = 0,
                   const char* filter = nullptr)
{
    nlsdist_run_options o;
    nlsdist_run_options_init(&o);
    std::string dir = out.string();
    o.config_path = cfg.c_str();
    o.out_dir = dir.c_str();
    o.strict = strict;
    o.filter = filter;
    return nlsdist_run(cmd, &o);
}

// |T|^2 for a square barrier of height a on [-L, L], independent closed form
double square_T2(double a, double L, double k)
{
    std::complex<double> q = std::sqrt(std::complex<double>(k * k - a));
    std::complex<double> s = std::sin(2.0 * q * L);
    double t = 1.0 + std::norm(a * s / (2.0 * k * q));
    return 1.0 / t;
}

} // namespace

TEST_CASE("null arguments and errors are reported")
{
    CHECK(nlsdist_potential_create(NLSDIST_GAUSSIAN, 1, 1, -5, 5, 101, nullptr) == NLSDIST_ERR_INVALID_ARGUMENT);
    CHECK(std::string(nlsdist_last_error()).size() > 0);
    nlsdist_potential* p = nullptr;
    CHECK(nlsdist_potential_create(NLSDIST_GAUSSIAN, 1, 1, 5, -5, 101, &p) == NLSDIST_ERR_INVALID_ARGUMENT);
    CHECK(p == nullptr);
    CHECK(nlsdist_potential_from_json("{not json", &p) == NLSDIST_ERR_INVALID_ARGUMENT);
    CHECK(nlsdist_run("bogus", nullptr) == NLSDIST_ERR_INVALID_ARGUMENT);
    CHECK(nlsdist_exit_code(NLSDIST_OK) == 0);
    CHECK(nlsdist_exit_code(NLSDIST_ERR_IO) == 1);
    CHECK(nlsdist_exit_code(NLSDIST_ERR_HYPOTHESIS) == 2);
    CHECK(nlsdist_exit_code(NLSDIST_ERR_VERIFICATION) == 3);
    nlsdist_potential_free(nullptr);
    nlsdist_scattering_free(nullptr);
    nlsdist_basis_free(nullptr);
    CHECK(std::string(nlsdist_version()).size() > 0);
}

TEST_CASE("square barrier transmission through the C API")
{
    nlsdist_potential* p = nullptr;
    REQUIRE(nlsdist_potential_create(NLSDIST_SQUARE, 1.0, 1.0, -5, 5, 1001, &p) == NLSDIST_OK);
    double v = 0;
    REQUIRE(nlsdist_potential_eval(p, 0.2, &v) == NLSDIST_OK);
    CHECK(v == 1.0);
    double k[] = {0.5, 1.3, 2.0, 5.0};
    nlsdist_scattering* s = nullptr;
    REQUIRE(nlsdist_scattering_compute(p, k, 4, &s) == NLSDIST_OK);
    CHECK(nlsdist_scattering_size(s) == 4);
    for (size_t j = 0; j < 4; ++j) {
        double kk, T[2], Rp[2], Rm[2];
        REQUIRE(nlsdist_scattering_get(s, j, &kk, T, Rp, Rm) == NLSDIST_OK);
        CHECK(kk == k[j]);
        CHECK(std::abs(T[0] * T[0] + T[1] * T[1] - square_T2(1.0, 1.0, kk)) < 1e-6);
    }
    CHECK(nlsdist_scattering_max_unitarity_defect(s) < 1e-8);
    double T[2], Tn[2];
    nlsdist_scattering_at(s, 1.5, T, nullptr, nullptr);
    nlsdist_scattering_at(s, -1.5, Tn, nullptr, nullptr);
    CHECK(T[0] == Tn[0]);
    CHECK(T[1] == -Tn[1]);
    CHECK(nlsdist_scattering_get(s, 9, nullptr, nullptr, nullptr, nullptr) == NLSDIST_ERR_INVALID_ARGUMENT);

    char* h = nullptr;
    REQUIRE(nlsdist_potential_hypotheses(p, &h) == NLSDIST_OK);
    CHECK(std::string(h).find("\"w21_finite\":false") != std::string::npos);
    nlsdist_string_free(h);
    nlsdist_scattering_free(s);
    nlsdist_potential_free(p);
}

TEST_CASE("genericity report for a Gaussian barrier")
{
    nlsdist_potential* p = nullptr;
    REQUIRE(nlsdist_potential_from_json(
                R"({"family":"gaussian_barrier","params":{"amplitude":2,"width":1},"grid":{"x_min":-20,"x_max":20,"n_x":2001}})",
                &p) == NLSDIST_OK);
    std::vector<double> k;
    for (int j = 0; j < 5; ++j) k.push_back((j + 0.5) * 0.01);
    nlsdist_scattering* s = nullptr;
    REQUIRE(nlsdist_scattering_compute(p, k.data(), k.size(), &s) == NLSDIST_OK);
    char* g = nullptr;
    REQUIRE(nlsdist_scattering_genericity(s, &g) == NLSDIST_OK);
    CHECK(std::string(g).find("\"is_generic\":true") != std::string::npos);
    nlsdist_string_free(g);
    nlsdist_scattering_free(s);
    nlsdist_potential_free(p);
}

TEST_CASE("basis round trip through the C API")
{
    nlsdist_potential* p = nullptr;
    REQUIRE(nlsdist_potential_create(NLSDIST_SECH2, 1.0, 1.0, -20, 20, 1025, &p) == NLSDIST_OK);
    nlsdist_basis* b = nullptr;
    REQUIRE(nlsdist_basis_create(p, -40, 40, 1024, 1.25, 0.0, &b) == NLSDIST_OK);
    size_t nx = nlsdist_basis_nx(b), nk = nlsdist_basis_nk(b);
    CHECK(nx == 1024);
    CHECK(nk >= 1280);
    std::vector<double> kk(nk), f(2 * nx), s(2 * nk), g(2 * nx);
    REQUIRE(nlsdist_basis_k(b, kk.data()) == NLSDIST_OK);
    CHECK(kk.front() == -kk.back());
    double h = 80.0 / double(nx - 1), nf = 0, ns = 0, err = 0;
    for (size_t i = 0; i < nx; ++i) {
        double x = -40 + h * double(i);
        f[2 * i] = std::exp(-0.5 * (x - 1) * (x - 1)) * std::cos(0.8 * x);
        f[2 * i + 1] = std::exp(-0.5 * (x - 1) * (x - 1)) * std::sin(0.8 * x);
        nf += (f[2 * i] * f[2 * i] + f[2 * i + 1] * f[2 * i + 1]) * h;
    }
    REQUIRE(nlsdist_basis_forward(b, f.data(), s.data()) == NLSDIST_OK);
    double dk = kk[1] - kk[0];
    for (size_t j = 0; j < nk; ++j) ns += (s[2 * j] * s[2 * j] + s[2 * j + 1] * s[2 * j + 1]) * dk;
    CHECK(std::abs(ns - nf) < 1e-8 * nf);
    REQUIRE(nlsdist_basis_inverse(b, s.data(), g.data()) == NLSDIST_OK);
    for (size_t i = 0; i < 2 * nx; ++i) err = std::max(err, std::abs(g[i] - f[i]));
    CHECK(err < 1e-8);
    CHECK(nlsdist_basis_forward(b, nullptr, s.data()) == NLSDIST_ERR_INVALID_ARGUMENT);
    nlsdist_basis_free(b);
    nlsdist_potential_free(p);
}

TEST_CASE("scatter writes a manifest whose hashes check out, deterministically")
{
    fs::path a = fresh_dir("scatter_a"), b = fresh_dir("scatter_b");
    REQUIRE(run("scatter", config("quick.json"), a) == NLSDIST_OK);
    REQUIRE(run("scatter", config("quick.json"), b) == NLSDIST_OK);
    size_t bad = 99;
    REQUIRE(nlsdist_check_manifest(a.string().c_str(), &bad) == NLSDIST_OK);
    CHECK(bad == 0);
    for (const char* f : {"scattering.csv", "scatter_summary.json", "jost.bin", "config.resolved.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    std::string m = slurp(a / "manifest.json");
    CHECK(m.find("\"config_hash\"") != std::string::npos);
    CHECK(m.find("\"seed\": 7") != std::string::npos);
    // tampering is detected
    std::ofstream(a / "scattering.csv", std::ios::app) << "x\n";
    REQUIRE(nlsdist_check_manifest(a.string().c_str(), &bad) == NLSDIST_OK);
    CHECK(bad == 1);
}

TEST_CASE("strict mode turns hypothesis violations into exit code 2")
{
    fs::path d = fresh_dir("strict");
    CHECK(run("scatter", config("square_barrier.json"), d, 0) == NLSDIST_OK);
    nlsdist_status st = run("scatter", config("square_barrier.json"), d, 1);
    CHECK(st == NLSDIST_ERR_HYPOTHESIS);
    CHECK(nlsdist_exit_code(st) == 2);
    CHECK(fs::exists(d / "scattering.csv"));
}

TEST_CASE("missing config is an io error")
{
    CHECK(run("scatter", config("does_not_exist.json"), fresh_dir("missing")) == NLSDIST_ERR_IO);
}

TEST_CASE("basis, evolve and asymptotics on a small run")
{
    fs::path d = fresh_dir("pipeline");
    REQUIRE(run("basis", config("quick.json"), d / "basis") == NLSDIST_OK);
    CHECK(fs::exists(d / "basis" / "basis.bin"));
    REQUIRE(run("evolve", config("quick.json"), d / "evolve") == NLSDIST_OK);
    CHECK(fs::exists(d / "evolve" / "conserved.csv"));
    CHECK(fs::exists(d / "evolve" / "snapshots" / "u_0000.bin"));
    REQUIRE(run("asymptotics", config("quick.json"), d / "asym") == NLSDIST_OK);
    CHECK(fs::exists(d / "asym" / "profiles_plus.csv"));
    CHECK(fs::exists(d / "asym" / "profiles_minus.csv"));
    size_t bad = 9;
    for (const char* sub : {"basis", "evolve", "asym"}) {
        REQUIRE(nlsdist_check_manifest((d / sub).string().c_str(), &bad) == NLSDIST_OK);
        CHECK(bad == 0);
    }
    // same config, same bytes
    REQUIRE(run("asymptotics", config("quick.json"), d / "asym2") == NLSDIST_OK);
    CHECK(slurp(d / "asym" / "asymptotics.json") == slurp(d / "asym2" / "asymptotics.json"));
    CHECK(slurp(d / "asym" / "profiles_minus.csv") == slurp(d / "asym2" / "profiles_minus.csv"));
}

TEST_CASE("verify with a filter runs the selected criterion only")
{
    fs::path d = fresh_dir("verify");
    REQUIRE(run("verify", config("quick.json"), d, 0, "flat_limit") == NLSDIST_OK);
    std::string v = slurp(d / "verify.json");
    CHECK(v.find("flat_limit") != std::string::npos);
    CHECK(v.find("unitarity") == std::string::npos);
    CHECK(nlsdist_criteria_count() == 15);
    CHECK(nlsdist_criterion_id(0) == 1);
    CHECK(std::string(nlsdist_criterion_name(2)) == "square_barrier_oracle");
}

TEST_CASE("log callback receives progress lines")
{
    std::vector<std::string> lines;
    nlsdist_run_options o;
    nlsdist_run_options_init(&o);
    std::string cfg = config("quick.json"), out = fresh_dir("log").string();
    o.config_path = cfg.c_str();
    o.out_dir = out.c_str();
    o.log = [](const char* l, void* u) { static_cast<std::vector<std::string>*>(u)->push_back(l); };
    o.log_user = &lines;
    REQUIRE(nlsdist_run("scatter", &o) == NLSDIST_OK);
    REQUIRE_FALSE(lines.empty());
    CHECK(lines.back().rfind("scatter:", 0) == 0);
}
