#include "config.hpp"
#include "helpers.hpp"
#include "io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace nlsdist;

namespace {

std::string temp_path(const std::string& name)
{
    auto d = std::filesystem::temp_directory_path() / "nlsdist_test_io";
    std::filesystem::create_directories(d);
    return (d / name).string();
}

} // namespace

TEST_CASE("sha256 of known vectors")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("shortest round-trip formatting")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0})
        CHECK(std::stod(fmt(v)) == v);
    CHECK(fmt(0.5) == "0.5");
}

TEST_CASE("csv rows must match the header")
{
    CsvWriter w({"a", "b"});
    w.row({1.0, 2.0});
    CHECK(w.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(w.row({1.0}), Error);
}

TEST_CASE("Jost field binary round trip")
{
    PotentialSpec p = testutil::make(PotentialFamily::gaussian_barrier, 1.0, 1.0, {-5.0, 5.0, 101});
    JostOptions jo;
    jo.store_stride = 4;
    JostField f = solve_m(p, p.grid, {0.5, 1.5}, JostSide::both, jo);
    std::string path = temp_path("jost.bin");
    write_jost_field(path, f, {{"note", "x"}});
    json header;
    JostField g = read_jost_field(path, &header);
    CHECK(header["note"] == "x");
    CHECK(header["format"] == "nlsdist-jost");
    CHECK(g.k == f.k);
    CHECK(g.x_grid.n == f.x_grid.n);
    CHECK(g.m_plus == f.m_plus);
    CHECK(g.m_minus == f.m_minus);
    CHECK(g.dk_m_plus == f.dk_m_plus);
    CHECK(g.int_vm_plus == f.int_vm_plus);
    CHECK(sha256_file(path) == sha256_hex(read_text_file(path)));
}

TEST_CASE("field binary round trip")
{
    UniformGrid x{-3.0, 3.0, 7};
    FieldState s{2.5, cvec{{1, 2}, {3, 4}, {5, 6}, {0, 0}, {-1, 0.5}, {1e-300, 0}, {7, -7}}};
    std::string path = temp_path("u.bin");
    write_field(path, s, x);
    UniformGrid y;
    FieldState r = read_field(path, &y);
    CHECK(r.t == 2.5);
    CHECK(r.u == s.u);
    CHECK(y.n == 7);
    CHECK_THROWS_AS(read_field(temp_path("missing.bin")), Error);
}

TEST_CASE("config round trip and hash")
{
    Config c = config_from_json(json::parse(R"({"potential":{"family":"sech2_barrier","params":{"amplitude":1.5,"width":2}},
        "run":{"dt":0.01,"t_max":50},"seed":42,"asymptotics":{"kappa":"published"}})"));
    CHECK(c.potential.family == PotentialFamily::sech2_barrier);
    CHECK(c.potential.amplitude == 1.5);
    CHECK(c.run.dt == 0.01);
    CHECK(c.seed == 42);
    CHECK(c.asymptotics.kappa == doctest::Approx(kappa_published()));
    Config d = config_from_json(config_to_json(c));
    CHECK(config_hash(c) == config_hash(d));
    d.seed = 43;
    CHECK(config_hash(c) != config_hash(d));
}

TEST_CASE("config rejects unknown keys and bad values")
{
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"bogus":1})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"run":{"dt":-1}})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"potential":{"family":"nope"}})")), Error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"run":{"scheme":"rk4"}})")), Error);
    CHECK_THROWS_AS(load_config(temp_path("missing.json")), Error);
}

TEST_CASE("snapshot list is sorted, unique and bounded")
{
    SnapshotSettings s;
    rvec t = snapshot_times(s, 100.0);
    CHECK(std::is_sorted(t.begin(), t.end()));
    CHECK(std::adjacent_find(t.begin(), t.end()) == t.end());
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 100.0);
    CHECK(std::find(t.begin(), t.end(), 50.0) != t.end());
    CHECK(std::find(t.begin(), t.end(), 200.0) == t.end());
}

TEST_CASE("initial data is a real Gaussian of the requested size")
{
    DataSettings d;
    UniformGrid x{-20.0, 20.0, 401};
    cvec u = initial_data(d, x);
    CHECK(std::abs(u[200]) == doctest::Approx(d.epsilon0));
    CHECK(std::abs(u[200 + 25] - d.epsilon0 * std::exp(-0.5 * (2.5 / d.sigma) * (2.5 / d.sigma))) < 1e-15);
}
