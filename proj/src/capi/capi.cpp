#include <nlsdist/nlsdist.h>

#include "pipeline.hpp"
#include "verify.hpp"

#include <cstring>
#include <new>

struct nlsdist_potential {
    nlsdist::PotentialSpec spec;
};

struct nlsdist_scattering {
    nlsdist::JostField field;
    nlsdist::ScatteringData data;
};

struct nlsdist_basis {
    std::optional<nlsdist::DistortedBasis> basis;
};

namespace {

using namespace nlsdist;

thread_local std::string last_error;

nlsdist_status status_of(ErrorKind k)
{
    switch (k) {
    case ErrorKind::invalid_argument: return NLSDIST_ERR_INVALID_ARGUMENT;
    case ErrorKind::io: return NLSDIST_ERR_IO;
    case ErrorKind::convergence: return NLSDIST_ERR_CONVERGENCE;
    case ErrorKind::hypothesis: return NLSDIST_ERR_HYPOTHESIS;
    case ErrorKind::verification: return NLSDIST_ERR_VERIFICATION;
    }
    return NLSDIST_ERR_INTERNAL;
}

template <class F>
nlsdist_status guarded(F&& f)
{
    last_error.clear();
    try {
        f();
        return NLSDIST_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const json::exception& e) {
        last_error = e.what();
        return NLSDIST_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return NLSDIST_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return NLSDIST_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (!p) fail(ErrorKind::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(double* dst, cplx v)
{
    if (!dst) return;
    dst[0] = v.real();
    dst[1] = v.imag();
}

} // namespace

extern "C" {

const char* nlsdist_version(void) { return NLSDIST_VERSION; }

const char* nlsdist_last_error(void) { return last_error.c_str(); }

int nlsdist_exit_code(nlsdist_status s)
{
    switch (s) {
    case NLSDIST_OK: return 0;
    case NLSDIST_ERR_HYPOTHESIS: return 2;
    case NLSDIST_ERR_VERIFICATION: return 3;
    default: return 1;
    }
}

void nlsdist_string_free(char* s) { std::free(s); }

nlsdist_status nlsdist_potential_create(nlsdist_family family, double amplitude, double width, double x_min,
                                        double x_max, size_t n, nlsdist_potential** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        PotentialSpec s;
        switch (family) {
        case NLSDIST_GAUSSIAN: s.family = PotentialFamily::gaussian_barrier; break;
        case NLSDIST_SECH2: s.family = PotentialFamily::sech2_barrier; break;
        case NLSDIST_SQUARE: s.family = PotentialFamily::square_barrier; break;
        default: fail(ErrorKind::invalid_argument, "unknown potential family");
        }
        s.amplitude = amplitude;
        s.width = width;
        s.grid = {x_min, x_max, n};
        s.validate();
        *out = new nlsdist_potential{s};
    });
}

nlsdist_status nlsdist_potential_from_samples(const double* samples, size_t n, double x_min, double x_max,
                                              nlsdist_potential** out)
{
    return guarded([&] {
        need(out, "out");
        need(samples, "samples");
        *out = nullptr;
        PotentialSpec s;
        s.family = PotentialFamily::custom_samples;
        s.grid = {x_min, x_max, n};
        s.samples.assign(samples, samples + n);
        s.validate();
        *out = new nlsdist_potential{s};
    });
}

nlsdist_status nlsdist_potential_from_json(const char* json_text, nlsdist_potential** out)
{
    return guarded([&] {
        need(out, "out");
        need(json_text, "json_text");
        *out = nullptr;
        PotentialSpec s = potential_from_json(json::parse(json_text));
        s.validate();
        *out = new nlsdist_potential{s};
    });
}

void nlsdist_potential_free(nlsdist_potential* p) { delete p; }

nlsdist_status nlsdist_potential_eval(const nlsdist_potential* p, double x, double* out)
{
    return guarded([&] {
        need(p, "potential");
        need(out, "out");
        *out = p->spec(x);
    });
}

nlsdist_status nlsdist_potential_hypotheses(const nlsdist_potential* p, char** json_out)
{
    return guarded([&] {
        need(p, "potential");
        need(json_out, "json_out");
        *json_out = nullptr;
        HypothesisReport h = hypothesis_report(p->spec, sample_potential(p->spec));
        *json_out = dup_string(hypothesis_json(h).dump());
    });
}

nlsdist_status nlsdist_scattering_compute(const nlsdist_potential* p, const double* k, size_t nk,
                                          nlsdist_scattering** out)
{
    return guarded([&] {
        need(p, "potential");
        need(k, "k");
        need(out, "out");
        *out = nullptr;
        require(nk > 0, "empty k list");
        rvec kv(k, k + nk);
        for (double q : kv) require(q > 0.0 && std::isfinite(q), "k values must be positive");
        JostOptions jo;
        jo.store_stride = 0;
        auto s = std::make_unique<nlsdist_scattering>();
        s->field = solve_m(p->spec, p->spec.grid, kv, JostSide::both, jo);
        s->data = compute_TR(s->field);
        *out = s.release();
    });
}

void nlsdist_scattering_free(nlsdist_scattering* s) { delete s; }

size_t nlsdist_scattering_size(const nlsdist_scattering* s) { return s ? s->data.size() : 0; }

nlsdist_status nlsdist_scattering_get(const nlsdist_scattering* s, size_t j, double* k, double T[2],
                                      double R_plus[2], double R_minus[2])
{
    return guarded([&] {
        need(s, "scattering");
        require(j < s->data.size(), "index out of range");
        if (k) *k = s->data.k[j];
        put(T, s->data.T[j]);
        put(R_plus, s->data.R_plus[j]);
        put(R_minus, s->data.R_minus[j]);
    });
}

nlsdist_status nlsdist_scattering_at(const nlsdist_scattering* s, double k, double T[2], double R_plus[2],
                                     double R_minus[2])
{
    return guarded([&] {
        need(s, "scattering");
        require(std::isfinite(k), "k must be finite");
        auto c = s->data.at(k);
        put(T, c.T);
        put(R_plus, c.R_plus);
        put(R_minus, c.R_minus);
    });
}

double nlsdist_scattering_max_unitarity_defect(const nlsdist_scattering* s)
{
    return s ? s->data.max_unitarity_defect() : 0.0;
}

nlsdist_status nlsdist_scattering_genericity(const nlsdist_scattering* s, char** json_out)
{
    return guarded([&] {
        need(s, "scattering");
        need(json_out, "json_out");
        *json_out = nullptr;
        require(s->data.size() >= 3, "genericity needs at least three k values");
        *json_out = dup_string(genericity_json(genericity_report(s->field, s->data)).dump());
    });
}

nlsdist_status nlsdist_basis_create(const nlsdist_potential* p, double x_min, double x_max, size_t n,
                                    double oversample, double k_cut, nlsdist_basis** out)
{
    return guarded([&] {
        need(p, "potential");
        need(out, "out");
        *out = nullptr;
        require(n >= 8 && x_max > x_min, "invalid propagation grid");
        require(oversample >= 1.0, "oversample must be >= 1");
        BasisOptions bo;
        bo.oversample = oversample;
        if (k_cut > 0.0) bo.k_cut = k_cut;
        auto b = std::make_unique<nlsdist_basis>();
        b->basis.emplace(make_basis(p->spec, UniformGrid{x_min, x_max, n}, bo));
        *out = b.release();
    });
}

void nlsdist_basis_free(nlsdist_basis* b) { delete b; }

size_t nlsdist_basis_nx(const nlsdist_basis* b) { return b ? b->basis->x_grid().n : 0; }

size_t nlsdist_basis_nk(const nlsdist_basis* b) { return b ? b->basis->k_grid().size() : 0; }

nlsdist_status nlsdist_basis_k(const nlsdist_basis* b, double* k_out)
{
    return guarded([&] {
        need(b, "basis");
        need(k_out, "k_out");
        const KGrid& g = b->basis->k_grid();
        for (std::size_t i = 0; i < g.size(); ++i) k_out[i] = g.at(i);
    });
}

nlsdist_status nlsdist_basis_forward(const nlsdist_basis* b, const double* f, double* out)
{
    return guarded([&] {
        need(b, "basis");
        need(f, "f");
        need(out, "out");
        b->basis->forward(reinterpret_cast<const cplx*>(f), reinterpret_cast<cplx*>(out));
    });
}

nlsdist_status nlsdist_basis_inverse(const nlsdist_basis* b, const double* spectrum, double* out)
{
    return guarded([&] {
        need(b, "basis");
        need(spectrum, "spectrum");
        need(out, "out");
        b->basis->inverse(reinterpret_cast<const cplx*>(spectrum), reinterpret_cast<cplx*>(out));
    });
}

void nlsdist_run_options_init(nlsdist_run_options* opt)
{
    if (opt) std::memset(opt, 0, sizeof *opt);
}

nlsdist_status nlsdist_run(const char* command, const nlsdist_run_options* opt)
{
    return guarded([&] {
        need(command, "command");
        CommandOptions o;
        if (opt) {
            if (opt->config_path) o.config_path = opt->config_path;
            if (opt->out_dir) o.out_dir = opt->out_dir;
            if (opt->filter) o.filter = opt->filter;
            o.strict = opt->strict != 0;
            if (opt->has_seed) o.seed = opt->seed;
            if (opt->threads > 0) o.threads = opt->threads;
            if (opt->command_line) o.command_line = opt->command_line;
            if (opt->log) {
                nlsdist_log_fn fn = opt->log;
                void* user = opt->log_user;
                o.log = [fn, user](const std::string& s) { fn(s.c_str(), user); };
            }
        }
        run_command(command, o);
    });
}

nlsdist_status nlsdist_check_manifest(const char* out_dir, size_t* n_bad)
{
    return guarded([&] {
        need(out_dir, "out_dir");
        need(n_bad, "n_bad");
        auto bad = check_manifest(out_dir);
        *n_bad = bad.size();
        if (!bad.empty()) {
            std::string s;
            for (const auto& b : bad) s += (s.empty() ? "" : ", ") + b;
            last_error = "hash mismatch: " + s;
        }
    });
}

size_t nlsdist_criteria_count(void) { return criteria().size(); }

int nlsdist_criterion_id(size_t i) { return i < criteria().size() ? criteria()[i].id : -1; }

const char* nlsdist_criterion_name(size_t i) { return i < criteria().size() ? criteria()[i].name : ""; }

} // extern "C"
