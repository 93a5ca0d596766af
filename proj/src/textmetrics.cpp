// Copyright 2026 The prosodyrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosodyrl/textmetrics.hpp"

#include <algorithm>
#include <cctype>

namespace prosodyrl {

TokenSequence normalize_tokens(const std::string& text) {
  TokenSequence tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
      continue;
    }
    if (std::isalnum(c) || c == '\'') {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

namespace {

// Cell of the alignment lattice: cost plus the move that produced it.
enum class Move : unsigned char { kStart, kMatch, kSub, kDel, kIns };

}  // namespace

EditCounts edit_counts(const TokenSequence& ref, const TokenSequence& hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<long> cost((n + 1) * (m + 1));
  std::vector<Move> move((n + 1) * (m + 1), Move::kStart);
  auto idx = [m](size_t i, size_t j) { return i * (m + 1) + j; };

  for (size_t i = 1; i <= n; ++i) {
    cost[idx(i, 0)] = static_cast<long>(i);
    move[idx(i, 0)] = Move::kDel;
  }
  for (size_t j = 1; j <= m; ++j) {
    cost[idx(0, j)] = static_cast<long>(j);
    move[idx(0, j)] = Move::kIns;
  }
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const bool match = ref[i - 1] == hyp[j - 1];
      long best = cost[idx(i - 1, j - 1)] + (match ? 0 : 1);
      Move best_move = match ? Move::kMatch : Move::kSub;
      if (const long del = cost[idx(i - 1, j)] + 1; del < best) {
        best = del;
        best_move = Move::kDel;
      }
      if (const long ins = cost[idx(i, j - 1)] + 1; ins < best) {
        best = ins;
        best_move = Move::kIns;
      }
      cost[idx(i, j)] = best;
      move[idx(i, j)] = best_move;
    }
  }

  EditCounts counts;
  counts.reference_length = static_cast<long>(n);
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    switch (move[idx(i, j)]) {
      case Move::kMatch:
        --i;
        --j;
        break;
      case Move::kSub:
        ++counts.substitutions;
        --i;
        --j;
        break;
      case Move::kDel:
        ++counts.deletions;
        --i;
        break;
      case Move::kIns:
        ++counts.insertions;
        --j;
        break;
      case Move::kStart:
        return counts;  // unreachable for i>0 || j>0
    }
  }
  return counts;
}

double wer_from_counts(long total_errors, long reference_length) {
  if (reference_length == 0) {
    return total_errors == 0 ? 0.0 : static_cast<double>(total_errors);
  }
  return static_cast<double>(total_errors) /
         static_cast<double>(reference_length);
}

double wer(const std::string& ref_text, const std::string& hyp_text) {
  const EditCounts counts =
      edit_counts(normalize_tokens(ref_text), normalize_tokens(hyp_text));
  return wer_from_counts(counts.total_errors(), counts.reference_length);
}

}  // namespace prosodyrl
