#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "linhyp/errors.hpp"
#include "linhyp/hypergraph.hpp"

namespace linhyp {

namespace detail {

// Strict "a b c" with single spaces, no leading/trailing blanks.
inline std::vector<long> parse_int_row(const std::string& line, int lineno) {
  std::vector<long> out;
  std::size_t i = 0;
  const auto bad = [&](const std::string& why) {
    fail(errc::parse_error, "line " + std::to_string(lineno) + ": " + why);
  };
  if (line.empty()) bad("empty line");
  while (i < line.size()) {
    if (!std::isdigit(static_cast<unsigned char>(line[i]))) bad("expected digit");
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j - i > 1 && line[i] == '0') bad("leading zero");
    out.push_back(std::stol(line.substr(i, j - i)));
    i = j;
    if (i == line.size()) break;
    if (line[i] != ' ') bad("expected single space separator");
    ++i;
    if (i == line.size()) bad("trailing space");
  }
  return out;
}

}  // namespace detail

/// Reads the ".lh" text format: header "n r m", then m lines of r strictly
/// increasing 1-based vertex indices; '#' lines are comments.
inline Hypergraph read_lh(std::istream& in) {
  std::string line;
  int lineno = 0;
  long n = -1, r = -1, m = -1;
  std::vector<std::vector<int>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') continue;
    auto row = detail::parse_int_row(line, lineno);
    if (n < 0) {
      if (row.size() != 3)
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": header must be 'n r m'");
      n = row[0];
      r = row[1];
      m = row[2];
      if (n < 1 || r < 1 || m < 0)
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": bad header values");
      continue;
    }
    if (static_cast<long>(row.size()) != r)
      fail(errc::parse_error,
           "line " + std::to_string(lineno) + ": expected " + std::to_string(r) + " vertices");
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] <= row[k - 1])
        fail(errc::parse_error,
             "line " + std::to_string(lineno) + ": vertices must be strictly increasing");
    edges.emplace_back(row.begin(), row.end());
  }
  if (n < 0) fail(errc::parse_error, "line 1: missing header");
  if (static_cast<long>(edges.size()) != m)
    fail(errc::parse_error, "line " + std::to_string(lineno) + ": expected " + std::to_string(m) +
                                " edges, found " + std::to_string(edges.size()));
  try {
    return Hypergraph::build(static_cast<int>(n), static_cast<int>(r), edges);
  } catch (const error& e) {
    fail(errc::parse_error, std::string("invalid hypergraph: ") + e.what());
  }
}

inline Hypergraph read_lh_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::parse_error, "cannot open " + path);
  return read_lh(in);
}

inline void write_lh(std::ostream& out, const Hypergraph& h) {
  out << h.n() << ' ' << h.r() << ' ' << h.m() << '\n';
  for (const auto& e : h.edges_1based()) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) out << ' ';
      out << e[i];
    }
    out << '\n';
  }
}

inline void write_lh_file(const std::string& path, const Hypergraph& h) {
  std::ofstream out(path);
  require(out.good(), errc::parse_error, "cannot open " + path + " for writing");
  write_lh(out, h);
}

}  // namespace linhyp
