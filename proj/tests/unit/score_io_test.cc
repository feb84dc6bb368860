// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "oracles.hpp"
#include "velocomp/czsl/io.hpp"
#include "velocomp/error.hpp"

namespace velocomp::czsl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScoreMatrix sample() {
  Rng rng(1);
  ScoreMatrix m = oracle::random_score_matrix(rng, 5, 4);
  // Stored as f32 on disk; use exactly representable values.
  for (double& s : m.scores) s = static_cast<double>(static_cast<float>(s));
  m.at(2, 3) = -kInf;
  return m;
}

TEST(ScoreFile, LayoutAndRoundTrip) {
  const ScoreMatrix m = sample();
  const std::string bytes = encode_score_matrix(m);
  ASSERT_EQ(bytes.size(), 16u + 4 * 20 + 4 * 5 + 4);
  EXPECT_EQ(bytes.substr(0, 4), "FCSM");
  const ScoreMatrix back = decode_score_matrix(bytes);
  EXPECT_EQ(back.rows, 5u);
  EXPECT_EQ(back.cols, 4u);
  EXPECT_EQ(back.scores, m.scores);
  EXPECT_EQ(back.truth, m.truth);
  EXPECT_EQ(back.seen_mask, m.seen_mask);
  EXPECT_EQ(encode_score_matrix(back), bytes);
}

TEST(ScoreFile, SaveLoadIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "velocomp_fcsm";
  std::filesystem::create_directories(dir);
  save_score_matrix(sample(), dir / "a.fcsm");
  const ScoreMatrix back = load_score_matrix(dir / "a.fcsm");
  save_score_matrix(back, dir / "b.fcsm");
  EXPECT_EQ(encode_score_matrix(load_score_matrix(dir / "b.fcsm")), encode_score_matrix(back));
}

TEST(ScoreFile, MalformedInputs) {
  const std::string bytes = encode_score_matrix(sample());
  EXPECT_THROW(decode_score_matrix(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(decode_score_matrix(bytes + "x"), FormatError);
  std::string bad = bytes;
  bad[0] = 'G';
  EXPECT_THROW(decode_score_matrix(bad), FormatError);
  bad = bytes;
  bad[bad.size() - 1] = 2;
  EXPECT_THROW(decode_score_matrix(bad), FormatError);
  bad = bytes;
  const float nan = std::nanf("");
  std::memcpy(bad.data() + 16 + 4, &nan, 4);
  try {
    decode_score_matrix(bad);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 20"), std::string::npos) << e.what();
  }
}

TEST(Report, KeyValueRoundTrip) {
  EvalReport r;
  r.best_seen = 0.1;
  r.best_unseen = 2.0 / 3.0;
  r.best_hm = 0.123456789012345678;
  r.auc = 0.05;
  r.curve = {{-kInf, 1.0, 0.0}, {0.3, 0.5, 0.25}, {kInf, 0.0, 1.0}};
  const std::string text = report_key_values(r);
  EXPECT_EQ(text.rfind("seen=", 0), 0u);
  const EvalReport back = parse_report_key_values(text);
  EXPECT_EQ(back.best_seen, r.best_seen);
  EXPECT_EQ(back.best_unseen, r.best_unseen);
  EXPECT_EQ(back.best_hm, r.best_hm);
  EXPECT_EQ(back.auc, r.auc);
  ASSERT_EQ(back.curve.size(), 3u);
  EXPECT_EQ(back.curve[0].bias, -kInf);
  EXPECT_EQ(back.curve[2].bias, kInf);
  EXPECT_EQ(back.curve[1].unseen, 0.25);
  EXPECT_THROW(parse_report_key_values("seen=abc\n"), FormatError);
  EXPECT_THROW(parse_report_key_values("colour=1\n"), FormatError);
}

TEST(Report, TableShowsPercentagesWithOneDecimal) {
  EvalReport r;
  r.best_seen = 0.4567;
  r.best_unseen = 0.1;
  const std::string table = report_table(r, "closed world");
  EXPECT_NE(table.find("closed world"), std::string::npos);
  EXPECT_NE(table.find("45.7"), std::string::npos);
  EXPECT_NE(table.find("10.0"), std::string::npos);
}

}  // namespace
}  // namespace velocomp::czsl
