// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "velocomp/czsl/metrics.hpp"

namespace velocomp::czsl {

inline constexpr std::uint32_t kScoreMatrixVersion = 1;

// "FCSM", version, rows, cols, f32 scores, u32 truth, u8 seen mask.
std::string encode_score_matrix(const ScoreMatrix& m);
ScoreMatrix decode_score_matrix(std::string_view bytes, const std::string& context = "score matrix");
void save_score_matrix(const ScoreMatrix& m, const std::filesystem::path& path);
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

// seen=, unseen=, hm=, auc= lines then one "curve=bias,seen,unseen" line per
// point. Doubles are printed round-trippable.
std::string report_key_values(const EvalReport& report);
EvalReport parse_report_key_values(std::string_view text);
std::string report_table(const EvalReport& report, std::string_view title);

}  // namespace velocomp::czsl
