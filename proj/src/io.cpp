#include "fracsp/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fracsp/error.hpp"
#include "json.hpp"

namespace fracsp {
namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) {
    require(r.size() == header.size(), "write_csv: row width does not match header");
    line(r);
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> c;
    for (double x : r) c.push_back(format_double(x));
    cells.push_back(std::move(c));
  }
  write_csv(path, header, cells);
}

void write_field(const std::string& base, const Field& u) {
  {
    std::ofstream out = open_out(base + ".f64");
    for (double x : u.values()) {
      std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(x));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) throw Error("write failed for '" + base + ".f64'");
  }
  nlohmann::ordered_json meta;
  meta["n"] = u.grid().n();
  meta["L"] = u.grid().L();
  meta["order"] = "row-major-x-fastest";
  meta["dtype"] = "f64le";
  write_text(base + ".json", meta.dump(2) + "\n");
}

Field read_raw_field(const std::string& path, const Grid& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != g.size() * 8)
    throw Error("'" + path + "' holds " + std::to_string(bytes) + " bytes, expected " +
                std::to_string(g.size() * 8) + " for n = " + std::to_string(g.n()));
  in.seekg(0);
  Field u(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::uint64_t bits;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    u[i] = std::bit_cast<double>(to_le(bits));
  }
  return u;
}

Field read_field(const std::string& base) {
  std::ifstream in(base + ".json");
  if (!in) throw Error("cannot read '" + base + ".json'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad field sidecar '" + base + ".json': " + e.what());
  }
  require(meta.value("dtype", "") == "f64le" && meta.value("order", "") == "row-major-x-fastest",
          "unsupported field layout in '" + base + ".json'");
  Grid g(meta.at("n").get<int>(), meta.at("L").get<double>());
  return read_raw_field(base + ".f64", g);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace fracsp
