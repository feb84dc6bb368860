// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/czsl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "velocomp/binary_io.hpp"
#include "velocomp/error.hpp"

namespace velocomp::czsl {
namespace {

constexpr std::string_view kMagic = "FCSM";

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("report value is not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string encode_score_matrix(const ScoreMatrix& m) {
  m.validate();
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kScoreMatrixVersion);
  w.u32(static_cast<std::uint32_t>(m.rows));
  w.u32(static_cast<std::uint32_t>(m.cols));
  for (double s : m.scores) w.f32(static_cast<float>(s));
  for (std::uint32_t t : m.truth) w.u32(t);
  for (std::uint8_t s : m.seen_mask) w.u8(s ? 1 : 0);
  return w.take();
}

ScoreMatrix decode_score_matrix(std::string_view bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  if (r.bytes(4) != kMagic) throw FormatError(context + ": bad magic, expected FCSM");
  const std::uint32_t version = r.u32();
  if (version != kScoreMatrixVersion) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  const std::size_t rows = r.u32(), cols = r.u32();
  const std::size_t expected = rows * cols * 4 + rows * 4 + cols;
  if (r.remaining() != expected) {
    throw FormatError(context + ": payload is " + std::to_string(r.remaining()) + " bytes, header implies " +
                      std::to_string(expected));
  }
  ScoreMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const std::size_t at = r.offset();
    const float v = r.f32();
    if (std::isnan(v)) throw DataError(context + ": NaN score at offset " + std::to_string(at));
    m.scores[i] = v;
  }
  for (auto& t : m.truth) t = r.u32();
  for (auto& s : m.seen_mask) {
    s = r.u8();
    if (s > 1) throw FormatError(context + ": seen mask byte must be 0 or 1");
  }
  m.validate();
  return m;
}

void save_score_matrix(const ScoreMatrix& m, const std::filesystem::path& path) {
  io::write_file(path, encode_score_matrix(m));
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
  return decode_score_matrix(io::read_file(path), path.string());
}

std::string report_key_values(const EvalReport& report) {
  std::string out;
  out += "seen=" + format_double(report.best_seen) + "\n";
  out += "unseen=" + format_double(report.best_unseen) + "\n";
  out += "hm=" + format_double(report.best_hm) + "\n";
  out += "auc=" + format_double(report.auc) + "\n";
  for (const auto& p : report.curve) {
    out += "curve=" + format_double(p.bias) + "," + format_double(p.seen) + "," + format_double(p.unseen) + "\n";
  }
  return out;
}

EvalReport parse_report_key_values(std::string_view text) {
  EvalReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("report line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "seen") {
      report.best_seen = parse_double(value);
    } else if (key == "unseen") {
      report.best_unseen = parse_double(value);
    } else if (key == "hm") {
      report.best_hm = parse_double(value);
    } else if (key == "auc") {
      report.auc = parse_double(value);
    } else if (key == "curve") {
      const auto c1 = value.find(','), c2 = value.rfind(',');
      if (c1 == std::string_view::npos || c1 == c2) throw FormatError("curve line needs three fields: " + line);
      report.curve.push_back({parse_double(value.substr(0, c1)), parse_double(value.substr(c1 + 1, c2 - c1 - 1)),
                              parse_double(value.substr(c2 + 1))});
    } else {
      throw FormatError("unknown report key '" + key + "'");
    }
  }
  return report;
}

std::string report_table(const EvalReport& report, std::string_view title) {
  char buf[160];
  std::string out(title);
  out += "\n";
  std::snprintf(buf, sizeof buf, "  %-8s %8s %8s %8s\n", "seen", "unseen", "hm", "auc");
  out += buf;
  std::snprintf(buf, sizeof buf, "  %-8.1f %8.1f %8.1f %8.1f\n", 100.0 * report.best_seen, 100.0 * report.best_unseen,
                100.0 * report.best_hm, 100.0 * report.auc);
  out += buf;
  return out;
}

}  // namespace velocomp::czsl
