#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>

#include "mrfselect/truth.hpp"
#include "mrfselect/types.hpp"

namespace mrfselect {

/// Reads a sample from CSV: rows = time points, columns = vertices, cells
/// nonnegative integer symbols. alphabet_size 0 means infer as 1 + max symbol.
inline Sample ingest_csv(std::istream& in, bool has_header = false, int alphabet_size = 0) {
  std::vector<std::uint8_t> data;
  std::string line;
  std::size_t lineno = 0;
  int d = -1;
  int max_symbol = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (has_header && lineno == 1) continue;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int col = 0;
    while (std::getline(row, cell, ',')) {
      ++col;
      std::size_t pos = 0;
      long value = -1;
      try {
        value = std::stol(cell, &pos);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(lineno) + ", col " + std::to_string(col) +
                          ": not an integer: '" + cell + "'");
      }
      // Trailing junk after the number is as bad as no number.
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size() || value < 0 || value > 255)
        throw FormatError("line " + std::to_string(lineno) + ", col " + std::to_string(col) +
                          ": bad cell '" + cell + "'");
      if (alphabet_size > 0 && value >= alphabet_size)
        throw InvalidSymbol("line " + std::to_string(lineno) + ", col " + std::to_string(col) +
                            ": symbol " + std::to_string(value) + " >= declared alphabet size " +
                            std::to_string(alphabet_size));
      max_symbol = std::max(max_symbol, static_cast<int>(value));
      data.push_back(static_cast<std::uint8_t>(value));
    }
    if (d < 0)
      d = col;
    else if (col != d)
      throw FormatError("line " + std::to_string(lineno) + ": ragged row, expected " +
                        std::to_string(d) + " cells, got " + std::to_string(col));
  }
  if (d < 1 || data.empty()) throw FormatError("empty sample");
  const int alpha = alphabet_size > 0 ? alphabet_size : std::max(2, max_symbol + 1);
  return Sample(ProblemDims(d, alpha), std::move(data));
}

inline Sample ingest_csv_file(const std::string& path, bool has_header = false,
                              int alphabet_size = 0) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  return ingest_csv(in, has_header, alphabet_size);
}

inline void export_csv(const Sample& sample, std::ostream& out) {
  for (std::size_t i = 0; i < sample.n(); ++i) {
    for (int v = 0; v < sample.dims().d; ++v) {
      if (v) out << ',';
      out << sample.at(i, v);
    }
    out << '\n';
  }
}

inline void export_csv_file(const Sample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  export_csv(sample, out);
}

/// Plain-text model format, 1-indexed vertices:
///   line 1: "d |A|"
///   then one line per vertex: "v h_0 ... h_{|A|-1}"
///   then one line per edge:   "u v J_00 ... J_{|A|-1,|A|-1}" (row-major)
inline void export_model(const PairwisePotentialSpec& spec, std::ostream& out) {
  out << spec.dims.d << ' ' << spec.dims.alphabet_size << '\n';
  out << std::setprecision(17);
  for (int v = 0; v < spec.dims.d; ++v) {
    out << (v + 1);
    for (double h : spec.vertex_potentials[v]) out << ' ' << h;
    out << '\n';
  }
  for (const auto& [edge, J] : spec.edge_potentials) {
    out << (edge.first + 1) << ' ' << (edge.second + 1);
    for (double j : J) out << ' ' << j;
    out << '\n';
  }
}

inline void export_model_file(const PairwisePotentialSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  export_model(spec, out);
}

inline PairwisePotentialSpec import_model(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  const auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  const auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("line " + std::to_string(lineno) + ": " + what);
  };

  if (!next_line()) throw FormatError("empty model file");
  std::stringstream header(line);
  int d = 0, alpha = 0;
  if (!(header >> d >> alpha) || d < 1 || alpha < 2) throw fail("bad header, expected 'd |A|'");

  PairwisePotentialSpec spec(ProblemDims(d, alpha));
  while (next_line()) {
    std::stringstream row(line);
    std::vector<double> nums;
    double x;
    while (row >> x) nums.push_back(x);
    if (!row.eof()) throw fail("malformed number");
    if (nums.size() == static_cast<size_t>(1 + alpha)) {
      const int v = static_cast<int>(nums[0]);
      if (v < 1 || v > d || nums[0] != v) throw fail("bad vertex index");
      spec.vertex_potentials[v - 1].assign(nums.begin() + 1, nums.end());
    } else if (nums.size() == static_cast<size_t>(2 + alpha * alpha)) {
      const int u = static_cast<int>(nums[0]), v = static_cast<int>(nums[1]);
      if (u < 1 || u > d || v < 1 || v > d || u == v || nums[0] != u || nums[1] != v)
        throw fail("bad edge endpoints");
      spec.set_edge(u - 1, v - 1, std::vector<double>(nums.begin() + 2, nums.end()));
    } else {
      throw fail("expected vertex line (1+" + std::to_string(alpha) + " fields) or edge line (2+" +
                 std::to_string(alpha * alpha) + " fields), got " + std::to_string(nums.size()));
    }
  }
  return spec;
}

inline PairwisePotentialSpec import_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  return import_model(in);
}

/// Undirected DOT output, 1-indexed vertices, one edge line per edge.
inline void export_dot(const Graph& g, std::ostream& out, const std::string& name = "estimate") {
  out << "graph " << name << " {\n";
  for (int v = 0; v < g.dims().d; ++v) out << "  " << (v + 1) << ";\n";
  for (const auto& [u, v] : g.edges()) out << "  " << (u + 1) << " -- " << (v + 1) << ";\n";
  out << "}\n";
}

inline void export_dot_file(const Graph& g, const std::string& path,
                            const std::string& name = "estimate") {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  export_dot(g, out, name);
}

}  // namespace mrfselect
