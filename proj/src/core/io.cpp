#include "io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nlsdist {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        fail(ErrorKind::io, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorKind::io, "write failed for '" + path + "'");
}

void ensure_directory(const std::string& path)
{
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) fail(ErrorKind::io, "cannot create directory '" + path + "': " + ec.message());
}

std::string fmt(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : ncol_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
    out_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values)
{
    require(values.size() == ncol_, "csv row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ',';
        out_ += fmt(values[i]);
    }
    out_ += '\n';
}

std::string scattering_csv(const ScatteringData& sd)
{
    CsvWriter w({"k", "re_T", "im_T", "re_R_plus", "im_R_plus", "re_R_minus", "im_R_minus", "unitarity_defect"});
    for (std::size_t j = 0; j < sd.size(); ++j)
        w.row({sd.k[j], sd.T[j].real(), sd.T[j].imag(), sd.R_plus[j].real(), sd.R_plus[j].imag(),
               sd.R_minus[j].real(), sd.R_minus[j].imag(), sd.unitarity_defect(j)});
    return w.str();
}

json grid_json(const UniformGrid& g) { return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_x", g.n}}; }

UniformGrid grid_from_json(const json& j)
{
    UniformGrid g{j.at("x_min").get<double>(), j.at("x_max").get<double>(), j.at("n_x").get<std::size_t>()};
    require(g.n >= 2 && g.x_max > g.x_min, "grid descriptor is invalid");
    return g;
}

namespace {

void put_complex(std::string& out, const cvec& v)
{
    std::size_t off = out.size();
    out.resize(off + v.size() * sizeof(cplx));
    std::memcpy(out.data() + off, v.data(), v.size() * sizeof(cplx));
}

cvec get_complex(const std::string& buf, std::size_t& pos, std::size_t n, const std::string& path)
{
    if (pos + n * sizeof(cplx) > buf.size()) fail(ErrorKind::io, "'" + path + "' is truncated");
    cvec v(n);
    std::memcpy(v.data(), buf.data() + pos, n * sizeof(cplx));
    pos += n * sizeof(cplx);
    return v;
}

std::pair<json, std::size_t> split_header(const std::string& buf, const std::string& path)
{
    auto nl = buf.find('\n');
    if (nl == std::string::npos) fail(ErrorKind::io, "'" + path + "' has no header line");
    try {
        return {json::parse(buf.substr(0, nl)), nl + 1};
    } catch (const json::exception& e) {
        fail(ErrorKind::io, "'" + path + "' header is not valid JSON: " + e.what());
    }
}

} // namespace

void write_jost_field(const std::string& path, const JostField& f, const json& extra)
{
    std::vector<std::pair<std::string, const cvec*>> fields;
    if (f.has_plus) fields.push_back({"m_plus", &f.m_plus});
    if (f.has_minus) fields.push_back({"m_minus", &f.m_minus});
    if (!f.dk_m_plus.empty()) fields.push_back({"dk_m_plus", &f.dk_m_plus});
    if (!f.dk_m_minus.empty()) fields.push_back({"dk_m_minus", &f.dk_m_minus});
    if (!f.d2k_m_plus.empty()) fields.push_back({"d2k_m_plus", &f.d2k_m_plus});
    if (!f.d2k_m_minus.empty()) fields.push_back({"d2k_m_minus", &f.d2k_m_minus});
    // per-k whole-line integrals follow the fields, one complex value per k
    std::vector<std::pair<std::string, const cvec*>> ints;
    for (auto [n, v] : {std::pair{"int_vm_plus", &f.int_vm_plus}, {"int_osc_plus", &f.int_osc_plus},
                        {"int_vm_minus", &f.int_vm_minus}, {"int_osc_minus", &f.int_osc_minus},
                        {"dk_int_vm_plus", &f.dk_int_vm_plus}, {"dk_int_osc_plus", &f.dk_int_osc_plus},
                        {"dk_int_vm_minus", &f.dk_int_vm_minus}, {"dk_int_osc_minus", &f.dk_int_osc_minus}})
        if (v->size() == f.k.size() && !v->empty()) ints.push_back({n, v});
    json h;
    h["format"] = "nlsdist-jost";
    h["version"] = 1;
    h["layout"] = "row-major (k, x), float64 (re, im) little-endian";
    h["x_grid"] = grid_json(f.x_grid);
    h["solve_grid"] = grid_json(f.solve_grid);
    h["k"] = f.k;
    h["derivative_order"] = f.derivative_order;
    h["romberg_levels"] = f.romberg_levels;
    json names = json::array();
    for (auto& [n, _] : fields) names.push_back(n);
    h["fields"] = names;
    json inames = json::array();
    for (auto& [n, _] : ints) inames.push_back(n);
    h["integrals"] = inames;
    h["store_stride"] = f.store_stride;
    for (auto& [key, val] : extra.items()) h[key] = val;
    std::string out = h.dump() + "\n";
    for (auto& [_, v] : fields) put_complex(out, *v);
    for (auto& [_, v] : ints) put_complex(out, *v);
    write_text_file(path, out);
}

JostField read_jost_field(const std::string& path, json* header)
{
    std::string buf = read_text_file(path);
    auto [h, pos] = split_header(buf, path);
    if (h.value("format", "") != "nlsdist-jost") fail(ErrorKind::io, "'" + path + "' is not a Jost field dump");
    JostField f;
    f.x_grid = grid_from_json(h.at("x_grid"));
    f.solve_grid = grid_from_json(h.at("solve_grid"));
    f.k = h.at("k").get<rvec>();
    f.derivative_order = h.at("derivative_order").get<int>();
    f.romberg_levels = h.value("romberg_levels", 1);
    std::size_t n = f.k.size() * f.x_grid.n;
    for (const auto& name : h.at("fields")) {
        cvec v = get_complex(buf, pos, n, path);
        std::string s = name.get<std::string>();
        if (s == "m_plus") f.m_plus = std::move(v), f.has_plus = true;
        else if (s == "m_minus") f.m_minus = std::move(v), f.has_minus = true;
        else if (s == "dk_m_plus") f.dk_m_plus = std::move(v);
        else if (s == "dk_m_minus") f.dk_m_minus = std::move(v);
        else if (s == "d2k_m_plus") f.d2k_m_plus = std::move(v);
        else if (s == "d2k_m_minus") f.d2k_m_minus = std::move(v);
        else fail(ErrorKind::io, "'" + path + "' names an unknown field '" + s + "'");
    }
    f.store_stride = h.value("store_stride", std::size_t(1));
    if (h.contains("integrals"))
        for (const auto& name : h.at("integrals")) {
            cvec v = get_complex(buf, pos, f.k.size(), path);
            std::string s = name.get<std::string>();
            cvec* dst = s == "int_vm_plus"        ? &f.int_vm_plus
                        : s == "int_osc_plus"     ? &f.int_osc_plus
                        : s == "int_vm_minus"     ? &f.int_vm_minus
                        : s == "int_osc_minus"    ? &f.int_osc_minus
                        : s == "dk_int_vm_plus"   ? &f.dk_int_vm_plus
                        : s == "dk_int_osc_plus"  ? &f.dk_int_osc_plus
                        : s == "dk_int_vm_minus"  ? &f.dk_int_vm_minus
                        : s == "dk_int_osc_minus" ? &f.dk_int_osc_minus
                                                  : nullptr;
            if (!dst) fail(ErrorKind::io, "'" + path + "' names an unknown integral '" + s + "'");
            *dst = std::move(v);
        }
    if (header) *header = h;
    return f;
}

void write_field(const std::string& path, const FieldState& s, const UniformGrid& x)
{
    require(s.u.size() == x.n, "write_field: sample count does not match the grid");
    json h{{"format", "nlsdist-field"}, {"version", 1}, {"t", s.t}, {"x_grid", grid_json(x)}};
    std::string out = h.dump() + "\n";
    put_complex(out, s.u);
    write_text_file(path, out);
}

FieldState read_field(const std::string& path, UniformGrid* x)
{
    std::string buf = read_text_file(path);
    auto [h, pos] = split_header(buf, path);
    if (h.value("format", "") != "nlsdist-field") fail(ErrorKind::io, "'" + path + "' is not a field snapshot");
    UniformGrid g = grid_from_json(h.at("x_grid"));
    FieldState s;
    s.t = h.at("t").get<double>();
    s.u = get_complex(buf, pos, g.n, path);
    if (x) *x = g;
    return s;
}

} // namespace nlsdist
