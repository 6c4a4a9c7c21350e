#pragma once

// Dataset ingestion and preprocessing, plus the circle/line sample
// generators used to compare measures on synthetic layouts.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bregman/classify.hpp"
#include "bregman/errors.hpp"

namespace bregman {

/// A column named by header text or by zero-based position.
using ColumnRef = std::variant<std::size_t, std::string>;

struct CsvSchema {
  ColumnRef label_column = std::string("label");
  /// Explicit feature columns; empty means every column that is neither the
  /// label nor listed in `drop_columns`.
  std::vector<ColumnRef> feature_columns;
  std::vector<ColumnRef> drop_columns;
  bool has_header = true;
  char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_row(std::string_view line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string>& header,
                                  std::size_t width) {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) {
    if (*idx >= width)
      throw SchemaError("column index " + std::to_string(*idx) + " out of range (" +
                        std::to_string(width) + " columns)");
    return *idx;
  }
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    // Allow numeric names when there is no matching header cell.
    if (auto v = parse_double(name); v && *v >= 0 && std::floor(*v) == *v && *v < width)
      return static_cast<std::size_t>(*v);
    throw SchemaError("column '" + name + "' not found");
  }
  return static_cast<std::size_t>(it - header.begin());
}

inline void write_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

} // namespace detail

/// Parses CSV text into a labeled dataset. Row order is preserved; rows
/// consisting only of whitespace are skipped.
inline LabeledDataset parse_csv(std::istream& in, const CsvSchema& schema,
                                std::string name = "csv") {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_row(line, schema.delimiter));
  }
  if (rows.empty()) throw ParseError("'" + name + "' is empty");

  std::vector<std::string> header;
  if (schema.has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    if (rows.empty()) throw ParseError("'" + name + "' has a header but no data rows");
  }
  const std::size_t width = schema.has_header ? header.size() : rows.front().size();

  const std::size_t label = detail::resolve_column(schema.label_column, header, width);
  std::vector<std::size_t> features;
  if (!schema.feature_columns.empty()) {
    for (const auto& c : schema.feature_columns)
      features.push_back(detail::resolve_column(c, header, width));
  } else {
    std::set<std::size_t> dropped;
    for (const auto& c : schema.drop_columns) dropped.insert(detail::resolve_column(c, header, width));
    for (std::size_t c = 0; c < width; ++c)
      if (c != label && !dropped.contains(c)) features.push_back(c);
  }
  if (std::find(features.begin(), features.end(), label) != features.end())
    throw SchemaError("label column is also listed as a feature column");
  if (features.empty()) throw SchemaError("no feature columns selected");

  LabeledDataset d;
  d.name = std::move(name);
  d.vectors.reserve(rows.size());
  d.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != width)
      throw ParseError("row " + std::to_string(r) + ": expected " + std::to_string(width) +
                           " columns, found " + std::to_string(cells.size()),
                       r);
    FeatureVector v;
    v.reserve(features.size());
    for (std::size_t c : features) {
      const auto value = detail::parse_double(cells[c]);
      if (!value || !std::isfinite(*value)) {
        const std::string col = header.empty() ? std::to_string(c) : "'" + header[c] + "'";
        throw ParseError("row " + std::to_string(r) + ", column " + col + ": '" + cells[c] +
                             "' is not a finite number",
                         r, c);
      }
      v.push_back(*value);
    }
    d.vectors.push_back(std::move(v));
    d.labels.push_back(cells[label]);
  }
  return d;
}

inline LabeledDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_csv(in, schema, path);
}

/// Writes features as f0..f{N-1} followed by a `label` column, 17
/// significant digits per value so that parse_csv restores them exactly.
inline void write_csv(std::ostream& os, const LabeledDataset& d, char delimiter = ',') {
  for (std::size_t c = 0; c < d.dimension(); ++c) os << 'f' << c << delimiter;
  os << "label\n";
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.vectors[r]) {
      detail::write_number(os, v);
      os << delimiter;
    }
    os << d.labels[r] << '\n';
  }
}

inline void write_csv(const std::string& path, const LabeledDataset& d, char delimiter = ',') {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write '" + path + "'");
  write_csv(os, d, delimiter);
}

inline LabeledDataset scale_features(LabeledDataset d, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw RangeError("scale factor must be positive and finite, got " + std::to_string(factor));
  for (auto& v : d.vectors)
    for (double& x : v) x *= factor;
  d.applied_scale *= factor;
  return d;
}

/// Keeps only instances whose label is in `keep`.
inline LabeledDataset filter_classes(const LabeledDataset& d, const std::vector<std::string>& keep) {
  const std::set<std::string> wanted(keep.begin(), keep.end());
  LabeledDataset out;
  out.name = d.name;
  out.applied_scale = d.applied_scale;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (wanted.contains(d.labels[i])) {
      out.vectors.push_back(d.vectors[i]);
      out.labels.push_back(d.labels[i]);
    }
  }
  return out;
}

/// The first `k` distinct labels in order of appearance.
inline std::vector<std::string> first_classes(const LabeledDataset& d, std::size_t k) {
  std::vector<std::string> seen;
  for (const auto& l : d.labels) {
    if (seen.size() == k) break;
    if (std::find(seen.begin(), seen.end(), l) == seen.end()) seen.push_back(l);
  }
  return seen;
}

enum class Shape { Circle, Line };

/// Parameters of a synthetic layout. Circle uses `center`, `radius`;
/// line uses `direction`, `step` and `reference_index`.
struct SyntheticSpec {
  Shape shape = Shape::Circle;
  FeatureVector center{2.0, 2.0};
  double radius = 1.0;
  FeatureVector direction{1.0, 1.0};
  double step = 0.5;
  std::size_t count = 16;
  std::size_t reference_index = 0;
};

/// Generated samples and the anchor every sample is compared against.
struct SyntheticSet {
  LabeledDataset samples;
  FeatureVector reference;
};

/// `count` points evenly spaced in angle on a circle around `center`; the
/// center is the reference. Labels are the angular position index.
inline SyntheticSet gen_circle(const SyntheticSpec& spec) {
  if (spec.shape != Shape::Circle) throw SpecError("gen_circle needs a circle spec");
  if (spec.count < 2) throw SpecError("count must be at least 2");
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) throw SpecError("radius must be positive");
  if (spec.center.size() != 2) throw SpecError("circle center must be 2-dimensional");
  SyntheticSet s;
  s.samples.name = "circle";
  for (std::size_t k = 0; k < spec.count; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(spec.count);
    s.samples.vectors.push_back({spec.center[0] + spec.radius * std::cos(theta),
                                 spec.center[1] + spec.radius * std::sin(theta)});
    s.samples.labels.push_back(std::to_string(k));
  }
  s.reference = spec.center;
  return s;
}

/// Samples k * step * direction for k = 1..count; the reference is sample
/// `reference_index` (the first by default).
inline SyntheticSet gen_line(const SyntheticSpec& spec) {
  if (spec.shape != Shape::Line) throw SpecError("gen_line needs a line spec");
  if (spec.count < 2) throw SpecError("count must be at least 2");
  if (!(spec.step > 0.0) || !std::isfinite(spec.step)) throw SpecError("step must be positive");
  if (spec.direction.empty() ||
      std::all_of(spec.direction.begin(), spec.direction.end(), [](double v) { return v == 0.0; }))
    throw SpecError("direction must be nonzero");
  if (spec.reference_index >= spec.count) throw SpecError("reference_index out of range");
  SyntheticSet s;
  s.samples.name = "line";
  for (std::size_t k = 1; k <= spec.count; ++k) {
    FeatureVector v(spec.direction.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = static_cast<double>(k) * spec.step * spec.direction[i];
    s.samples.vectors.push_back(std::move(v));
    s.samples.labels.push_back(std::to_string(k - 1));
  }
  s.reference = s.samples.vectors[spec.reference_index];
  return s;
}

inline SyntheticSet generate(const SyntheticSpec& spec) {
  return spec.shape == Shape::Circle ? gen_circle(spec) : gen_line(spec);
}

} // namespace bregman
