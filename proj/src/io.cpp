#include "satrrm/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "satrrm/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

namespace satrrm::io {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("short write to " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string fmt_double(double v) {
  // Try increasing precision until the value round-trips.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

static std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

Csv read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      csv.header = split_line(line);
      first = false;
    } else {
      csv.rows.push_back(split_line(line));
      if (csv.rows.back().size() != csv.header.size())
        throw ConfigError(path.string() + ": ragged row " + std::to_string(csv.rows.size()));
    }
  }
  if (first) throw ConfigError(path.string() + ": empty csv");
  return csv;
}

void write_csv(const std::filesystem::path& path, const Csv& csv) {
  std::string text;
  auto append_row = [&text](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += row[i];
    }
    text += '\n';
  };
  append_row(csv.header);
  for (const auto& row : csv.rows) append_row(row);
  write_text_file(path, text);
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("bad number literal: '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("bad integer literal: '" + s + "'");
  return v;
}

void write_blob(const std::filesystem::path& path, json header, const Blocks& blocks) {
  json manifest = json::array();
  for (const auto& [name, bytes] : blocks)
    manifest.push_back({{"name", name}, {"bytes", bytes.size()}});
  header["blocks"] = std::move(manifest);

  const std::string head = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  const std::uint64_t n = head.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, bytes] : blocks)
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("short write to " + path.string());
}

json read_blob(const std::filesystem::path& path, Blocks* blocks) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n > (1ull << 30)) throw ConfigError(path.string() + ": bad blob header");
  std::string head(n, '\0');
  in.read(head.data(), static_cast<std::streamsize>(n));
  if (!in) throw ConfigError(path.string() + ": truncated blob header");
  json header;
  try {
    header = json::parse(head);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (blocks) {
    blocks->clear();
    for (const auto& b : header.at("blocks")) {
      const std::size_t bytes = b.at("bytes").get<std::size_t>();
      std::vector<std::uint8_t> buf(bytes);
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
      if (!in) throw ConfigError(path.string() + ": truncated block " +
                                 b.at("name").get<std::string>());
      blocks->emplace_back(b.at("name").get<std::string>(), std::move(buf));
    }
  } else {
    // header-only read still rejects files shorter than the declared payload
    std::uint64_t expected = 0;
    for (const auto& b : header.at("blocks")) expected += b.at("bytes").get<std::uint64_t>();
    const auto here = in.tellg();
    in.seekg(0, std::ios::end);
    if (!in || static_cast<std::uint64_t>(in.tellg() - here) < expected)
      throw ConfigError(path.string() + ": truncated blob payload");
  }
  return header;
}

std::vector<std::uint8_t> f32_bytes(const std::vector<double>& v) {
  std::vector<std::uint8_t> out(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v[i]);
    std::memcpy(out.data() + 4 * i, &f, 4);
  }
  return out;
}

std::vector<double> f32_unbytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() % 4 != 0) throw ConfigError("float32 block length not a multiple of 4");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    float f = 0;
    std::memcpy(&f, bytes.data() + 4 * i, 4);
    out[i] = static_cast<double>(f);
  }
  return out;
}

}  // namespace satrrm::io
