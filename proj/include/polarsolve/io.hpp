#pragma once

// CSV tables, file digests and the run manifest.
//
// Numbers are written in fixed notation with 12 digits after the decimal
// point; negative zero prints as 0. Rows are ordered by ascending p.

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarsolve/grid.hpp"
#include "polarsolve/single_elite.hpp"
#include "polarsolve/two_elite.hpp"

namespace polarsolve {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCsvDecimals = 12;

inline std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", kCsvDecimals, x);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw IoError("csv: no column '" + name + "'");
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
    return out;
  }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += ',';
      out += cells[c];
    }
    out += '\n';
  };
  emit(t.header);
  for (const auto& r : t.rows) emit(r);
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::stringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw IoError("csv: ragged row '" + line + "'");
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, to_csv(t)); }
inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

/// One row per grid point: the point followed by the given columns.
inline CsvTable grid_table(const Grid& grid, std::vector<std::string> header,
                           const std::vector<const std::vector<double>*>& columns) {
  CsvTable t;
  t.header = std::move(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row{format_number(grid[i])};
    for (const auto* col : columns) row.push_back(format_number((*col)[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::vector<double> indices_to_points(const Grid& grid, const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = grid[idx[i]];
  return out;
}

inline CsvTable single_policy_table(const Grid& grid, const PolicyTable& policy) {
  const auto s0 = indices_to_points(grid, policy.sigma[0]);
  const auto s1 = indices_to_points(grid, policy.sigma[1]);
  return grid_table(grid, {"p", "sigma_s0", "sigma_s1"}, {&s0, &s1});
}

inline CsvTable single_value_table(const Grid& grid, const ValueTable& values) {
  return grid_table(grid, {"p", "v_s0", "v_s1"}, {&values.v[0], &values.v[1]});
}

inline CsvTable mpe_policy_table(const MpeSolution& sol) {
  const auto a0 = indices_to_points(sol.grid, sol.sigmaA[0]);
  const auto a1 = indices_to_points(sol.grid, sol.sigmaA[1]);
  const auto b0 = indices_to_points(sol.grid, sol.sigmaB[0]);
  const auto b1 = indices_to_points(sol.grid, sol.sigmaB[1]);
  return grid_table(sol.grid, {"p", "sigmaA_s0", "sigmaA_s1", "sigmaB_s0", "sigmaB_s1"}, {&a0, &a1, &b0, &b1});
}

inline CsvTable mpe_value_table(const MpeSolution& sol) {
  return grid_table(sol.grid, {"p", "vA_s0", "vA_s1", "uA", "vB_s0", "vB_s1", "uB"},
                    {&sol.vA[0], &sol.vA[1], &sol.uA, &sol.vB[0], &sol.vB[1], &sol.uB});
}

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw IoError("sha256: out of memory");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw IoError("sha256: digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

}  // namespace polarsolve
