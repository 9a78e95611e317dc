#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace satrrm::io {

using json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// Shortest decimal form that round-trips the exact double.
std::string fmt_double(double v);

// Minimal CSV (no quoting; fields produced here never contain commas).
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Csv read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Csv& csv);

double parse_double(const std::string& s);  // strict, throws ConfigError
std::int64_t parse_int(const std::string& s);

// Single-file container used for checkpoints and spike-raster dumps:
//   u64 little-endian header length | JSON header bytes | raw blocks
// The writer appends a "blocks" array ([{name, bytes}]) to the header so the
// reader can split the tail without any out-of-band knowledge.
using Blocks = std::vector<std::pair<std::string, std::vector<std::uint8_t>>>;
void write_blob(const std::filesystem::path& path, json header, const Blocks& blocks);
json read_blob(const std::filesystem::path& path, Blocks* blocks);

// double <-> packed little-endian float32 (checkpoint weight blocks).
std::vector<std::uint8_t> f32_bytes(const std::vector<double>& v);
std::vector<double> f32_unbytes(const std::vector<std::uint8_t>& bytes);

}  // namespace satrrm::io
