#pragma once

#include <string>
#include <vector>

#include "sae/matrix.hpp"
#include "sae/metrics.hpp"
#include "sae/trainer.hpp"

namespace sae {

/// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double v);

/// Fixed 17-significant-digit form used in CSV outputs.
std::string format_csv(double v);

/// Matrix text format: first line "rows cols", then one line per row of
/// space-separated shortest-round-trip floats.
std::string matrix_to_text(const Matrix& m);
Matrix matrix_from_text(const std::string& text);

void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix_file(const std::string& path);

/// header: iter,loss,frob_err,delta,consistency_rate,bias_max,contraction
std::string trace_to_csv(const TrainTrace& trace);

/// header: claim_id,instances,violations,worst_margin
std::string claims_to_csv(const std::vector<ClaimReport>& reports);

/// header: target_index,source_index,sign,distance
std::string match_to_csv(const MatchResult& match);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sae
