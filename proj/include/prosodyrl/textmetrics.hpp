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

#pragma once

#include <string>
#include <vector>

namespace prosodyrl {

// Word-level edit-distance machinery behind the intelligibility penalty.
// Text is normalized before comparison: lowercase, every character outside
// ASCII letters/digits/apostrophes dropped, then whitespace-split. The
// normalization is idempotent and ASCII-only by design.

using TokenSequence = std::vector<std::string>;

struct EditCounts {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long reference_length = 0;

  long total_errors() const { return substitutions + insertions + deletions; }
};

// Lowercase, strip punctuation, split on whitespace. Total on any input;
// empty input yields an empty sequence. Stripping joins fragments
// ("co-op" -> "coop") rather than splitting them.
TokenSequence normalize_tokens(const std::string& text);

// Minimum-cost alignment under unit substitution/insertion/deletion costs.
// The error total equals the token-level Levenshtein distance; the S/I/D
// split is one optimal decomposition (ties are broken deterministically,
// but only the total is contractual when several optima exist).
EditCounts edit_counts(const TokenSequence& ref, const TokenSequence& hyp);

// (S+I+D)/N over normalized tokens. May exceed 1 when insertions dominate.
// Empty-reference convention: wer("", "") = 0 and wer("", hyp) counts the
// hypothesis tokens against N = 1, so hallucinated words still cost.
double wer(const std::string& ref_text, const std::string& hyp_text);

// Same convention applied to precomputed counts; used for corpus totals.
double wer_from_counts(long total_errors, long reference_length);

}  // namespace prosodyrl
