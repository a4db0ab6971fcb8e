#pragma once

#include <span>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus {

/// Aggregate statistics over a segment list. Tokens are maximal
/// non-whitespace runs of the NFC transcript; unique_words counts distinct
/// tokens after comparison normalization (punctuation stripped, lowercased).
/// speaker_count counts distinct global speaker ids.
CorpusStats compute_stats(std::span<const Segment> segments);

}  // namespace ttscorpus
