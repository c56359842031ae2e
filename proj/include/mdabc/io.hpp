#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mdabc/abc.hpp"
#include "mdabc/dataset.hpp"
#include "mdabc/errors.hpp"

namespace mdabc {

namespace detail {

// Shortest decimal form that still round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// One-column CSV (header "value", LF endings) holding a univariate sample.
inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << "value\n";
  for (double v : data.values) out << detail::format_double(v) << "\n";
  if (!out) throw IoFailure("write failed: " + path);
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoFailure("empty file: " + path);
  detail::strip_cr(line);
  if (line != "value") {
    throw IoFailure("expected header line \"value\" in " + path);
  }
  Dataset data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    detail::strip_cr(line);
    if (line.empty()) continue;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0' || errno == ERANGE) {
      throw IoFailure(path + ": line " + std::to_string(row) +
                      " is not a number: " + line);
    }
    data.values.push_back(v);
  }
  if (data.values.empty()) throw IoFailure("no data rows in " + path);
  return data;
}

// Particle cloud as CSV: one row per particle, the named coordinates
// followed by the normalized weight and the particle's distance.
inline void write_cloud_csv(const ParticleCloud& cloud,
                            const std::vector<std::string>& coordinate_names,
                            const std::string& path) {
  if (cloud.size() == 0) throw EmptyCloud("write_cloud_csv: cloud has no particles");
  const std::size_t d = cloud.particles.front().theta.size();
  if (coordinate_names.size() != d) {
    throw DimensionMismatch("write_cloud_csv: coordinate names do not match theta");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  for (std::size_t j = 0; j < d; ++j) out << coordinate_names[j] << ",";
  out << "weight,distance\n";
  const auto w = cloud.normalized_weights();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out << detail::format_double(cloud.particles[i].theta[j]) << ",";
    }
    out << detail::format_double(w[i]) << ","
        << detail::format_double(cloud.particles[i].distance) << "\n";
  }
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace mdabc
