#include "sae/text_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sae {

std::string format_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_csv(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_text(const Matrix& m) {
  std::string out;
  out.reserve(m.rows() * m.cols() * 20 + 16);
  out += std::to_string(m.rows());
  out += ' ';
  out += std::to_string(m.cols());
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_shortest(m(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw IoError("matrix line " + std::to_string(line_no) + ": bad float '" + tok + "'");
  return v;
}

}  // namespace

Matrix matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix text: empty input");
  std::istringstream head(line);
  std::size_t rows = 0, cols = 0;
  if (!(head >> rows >> cols) || rows < 1 || cols < 1)
    throw IoError("matrix text: bad header line");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw IoError("matrix text: expected " + std::to_string(rows) + " rows, got " +
                    std::to_string(r));
    std::istringstream row(line);
    std::string tok;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!(row >> tok))
        throw IoError("matrix line " + std::to_string(r + 2) + ": expected " +
                      std::to_string(cols) + " entries");
      m(r, c) = parse_double(tok, r + 2);
    }
    if (row >> tok)
      throw IoError("matrix line " + std::to_string(r + 2) + ": trailing entries");
  }
  return m;
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  write_text_file(path, matrix_to_text(m));
}

Matrix read_matrix_file(const std::string& path) { return matrix_from_text(read_text_file(path)); }

std::string trace_to_csv(const TrainTrace& trace) {
  std::string out = "iter,loss,frob_err,delta,consistency_rate,bias_max,contraction\n";
  for (const TraceRow& r : trace.rows) {
    out += std::to_string(r.iter);
    out += ',';
    out += format_csv(r.loss);
    out += ',';
    out += format_csv(r.frob_err);
    out += ',';
    out += format_csv(r.delta);
    out += ',';
    out += format_csv(r.consistency_rate);
    out += ',';
    out += format_csv(r.bias_max);
    out += ',';
    out += format_csv(r.contraction);
    out += '\n';
  }
  return out;
}

std::string claims_to_csv(const std::vector<ClaimReport>& reports) {
  std::string out = "claim_id,instances,violations,worst_margin\n";
  for (const ClaimReport& r : reports) {
    out += r.claim_id;
    out += ',';
    out += std::to_string(r.instances);
    out += ',';
    out += std::to_string(r.violations);
    out += ',';
    out += format_csv(r.worst_margin);
    out += '\n';
  }
  return out;
}

std::string match_to_csv(const MatchResult& match) {
  std::string out = "target_index,source_index,sign,distance\n";
  for (std::size_t i = 0; i < match.permutation.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(match.permutation[i]);
    out += ',';
    out += format_csv(match.signs[i]);
    out += ',';
    out += format_csv(match.per_column_distance[i]);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace sae
