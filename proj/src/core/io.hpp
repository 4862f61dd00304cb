#pragma once

#include "common.hpp"
#include "dynamics.hpp"
#include "jost.hpp"
#include "scattering.hpp"

#include <json.hpp>

#include <string>

namespace nlsdist {

using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
void ensure_directory(const std::string& path);

// shortest round-trip text for a double
std::string fmt(double v);

// simple CSV builder; values written with fmt()
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    std::string str() const { return out_; }

private:
    std::size_t ncol_;
    std::string out_;
};

std::string scattering_csv(const ScatteringData& sd);

json grid_json(const UniformGrid& g);
UniformGrid grid_from_json(const json& j);

// binary layout: one JSON header line, then little-endian float64 (re, im) pairs
void write_jost_field(const std::string& path, const JostField& f, const json& extra = json::object());
JostField read_jost_field(const std::string& path, json* header = nullptr);

void write_field(const std::string& path, const FieldState& s, const UniformGrid& x);
FieldState read_field(const std::string& path, UniformGrid* x = nullptr);

} // namespace nlsdist
