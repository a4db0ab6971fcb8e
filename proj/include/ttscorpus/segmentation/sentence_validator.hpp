#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ttscorpus/corpus/types.hpp"
#include "ttscorpus/providers/provider.hpp"

namespace ttscorpus::segmentation {

enum class ExtensionDirection { end, both };
std::string_view to_string(ExtensionDirection d);
ExtensionDirection extension_direction_from_string(std::string_view s);

struct ExtensionPolicy {
  double step_s = 0.1;
  double max_total_extension_s = 5.0;
  double max_segment_s = 25.0;
  ExtensionDirection direction = ExtensionDirection::end;

  void validate() const;
  std::int64_t step_ms() const;
  /// ceil(max_total_extension_s / step_s)
  int max_extensions() const;
};

struct ValidationResult {
  Segment segment;  ///< completeness is complete or rejected
  int extensions = 0;
  int asr_calls = 0;
  std::string cause;  ///< empty when complete
};

/// Transcribes the candidate and grows it step by step until the classifier
/// accepts the transcript. Provider failures reject the segment and record
/// the error in `cause` rather than propagating.
ValidationResult validate_segment(const AudioBuffer& source, std::string_view source_id,
                                  const TimeSpan& candidate, providers::AsrProvider& asr,
                                  providers::CompletenessProvider& classifier,
                                  const ExtensionPolicy& policy = {});

}  // namespace ttscorpus::segmentation
