#include "vrszd/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "vrszd/error.hpp"

namespace vrszd {

namespace {

struct SparseRow {
  double raw_label;
  std::vector<std::pair<std::size_t, double>> entries;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

double parse_number(std::string_view token, std::size_t line, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM labels use.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

SparseRow parse_line(std::string_view text, std::size_t line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }
  SparseRow row{parse_number(tokens.front(), line, "label"), {}};
  std::size_t last_index = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const std::string_view tok = tokens[t];
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
      throw ParseError(line, "malformed token '" + std::string(tok) + "'");
    }
    std::size_t index = 0;
    const auto idx = tok.substr(0, colon);
    const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (ec != std::errc() || ptr != idx.data() + idx.size() || index == 0) {
      throw ParseError(line, "bad feature index '" + std::string(idx) + "'");
    }
    if (index <= last_index) throw ParseError(line, "feature indices must be strictly increasing");
    last_index = index;
    row.entries.emplace_back(index, parse_number(tok.substr(colon + 1), line, "value"));
  }
  return row;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::string name) {
  std::vector<SparseRow> rows;
  std::size_t d = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const bool blank = std::all_of(text.begin(), text.end(), [](char c) { return is_space(c); });
    if (blank) continue;
    SparseRow row = parse_line(text, line);
    if (!row.entries.empty()) d = std::max(d, row.entries.back().first);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("libsvm: no data rows");

  std::vector<double> distinct;
  for (const SparseRow& r : rows) distinct.push_back(r.raw_label);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() > 2) throw DataError("libsvm: more than two distinct labels");

  Dataset ds{Matrix(rows.size(), d), Vector(rows.size()), std::move(name)};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double raw = rows[i].raw_label;
    if (distinct.size() == 2) {
      ds.labels[i] = raw == distinct[1] ? 1.0 : 0.0;
    } else {
      // Single class: positive raw labels are the "1" class.
      ds.labels[i] = raw > 0.0 ? 1.0 : 0.0;
    }
    for (const auto& [index, value] : rows[i].entries) ds.x(i, index - 1) = value;
  }
  return ds;
}

Dataset parse_libsvm_text(std::string_view text, std::string name) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, std::move(name));
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  return parse_libsvm(in, name);
}

Dataset standardize(const Dataset& ds) {
  const std::size_t n = ds.x.rows();
  const std::size_t d = ds.x.cols();
  if (n < 2) throw InvalidArgument("standardize needs at least two rows");
  Dataset out = ds;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (ds.x(i, j) - mean) * (ds.x(i, j) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) out.x(i, j) = sd < 1e-12 ? 0.0 : (ds.x(i, j) - mean) / sd;
  }
  return out;
}

}  // namespace vrszd
