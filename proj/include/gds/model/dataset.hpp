#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/core/types.hpp"

namespace gds {

/// Observations in long format: one row per (unit, t) with covariates x1..xk.
struct Dataset {
  std::vector<std::int64_t> unit_id;
  std::vector<std::int64_t> t;
  Vector y;
  Matrix x;  // rows × k

  Index rows() const { return y.size(); }
  Index num_covariates() const { return x.cols(); }

  /// Row indices grouped by unit, units in order of first appearance.
  std::vector<std::vector<Index>> unit_rows() const {
    std::map<std::int64_t, std::size_t> slot;
    std::vector<std::vector<Index>> groups;
    for (Index r = 0; r < rows(); ++r) {
      auto [it, inserted] = slot.try_emplace(unit_id[static_cast<std::size_t>(r)], groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(r);
    }
    return groups;
  }

  Index num_units() const { return static_cast<Index>(unit_rows().size()); }
};

/// Shortest decimal text that round-trips the double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

inline Dataset parse_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset is empty (header row required)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_commas(line);
  if (header.size() < 3 || header[0] != "unit_id" || header[1] != "t" || header[2] != "y") {
    throw DataError("dataset header must start with unit_id,t,y");
  }
  const std::size_t k = header.size() - 3;
  for (std::size_t j = 0; j < k; ++j) {
    if (header[3 + j] != "x" + std::to_string(j + 1)) {
      throw DataError("dataset column " + std::to_string(4 + j) + " must be named x" + std::to_string(j + 1));
    }
  }

  std::vector<std::int64_t> units, ts;
  std::vector<double> ys, xs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    units.push_back(detail::parse_number<std::int64_t>(fields[0], line_no));
    ts.push_back(detail::parse_number<std::int64_t>(fields[1], line_no));
    ys.push_back(detail::parse_number<double>(fields[2], line_no));
    for (std::size_t j = 0; j < k; ++j) xs.push_back(detail::parse_number<double>(fields[3 + j], line_no));
  }

  Dataset ds;
  ds.unit_id = std::move(units);
  ds.t = std::move(ts);
  ds.y = Eigen::Map<const Vector>(ys.data(), static_cast<Index>(ys.size()));
  ds.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      xs.data(), static_cast<Index>(ys.size()), static_cast<Index>(k));
  return ds;
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return parse_dataset_csv(in);
}

inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "unit_id,t,y";
  for (Index j = 0; j < ds.num_covariates(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Index r = 0; r < ds.rows(); ++r) {
    const auto ur = static_cast<std::size_t>(r);
    out << ds.unit_id[ur] << ',' << ds.t[ur] << ',' << format_double(ds.y[r]);
    for (Index j = 0; j < ds.num_covariates(); ++j) out << ',' << format_double(ds.x(r, j));
    out << '\n';
  }
}

inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  write_dataset_csv(out, ds);
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace gds
