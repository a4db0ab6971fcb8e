#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttscorpus/corpus/types.hpp"

namespace ttscorpus::audio {

class AudioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Container is readable but its sample encoding is not supported.
class UnsupportedCodecError : public AudioError {
 public:
  using AudioError::AudioError;
};

/// File ends before a declared chunk does.
class TruncatedFileError : public AudioError {
 public:
  TruncatedFileError(const std::string& what, std::size_t byte_offset)
      : AudioError(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Decodes a RIFF/WAVE file holding integer PCM (8/16/24/32 bit) or IEEE
/// float (32/64 bit), including WAVE_FORMAT_EXTENSIBLE. Channels are
/// averaged to mono and samples scaled to [-1, 1].
AudioBuffer decode(const std::filesystem::path& path);
AudioBuffer decode_wav_bytes(std::span<const std::uint8_t> bytes);

/// 16-bit PCM mono WAV.
std::vector<std::uint8_t> encode_wav16(const AudioBuffer& buffer);
void write_wav16(const std::filesystem::path& path, const AudioBuffer& buffer);

/// Interleaved 16-bit PCM, for building multi-channel fixtures.
std::vector<std::uint8_t> encode_wav16_interleaved(std::span<const float> interleaved,
                                                   int channels, int sample_rate_hz);

/// Little-endian 16-bit PCM samples without a container.
std::vector<std::uint8_t> to_pcm16le(const AudioBuffer& buffer);
AudioBuffer from_pcm16le(std::span<const std::uint8_t> bytes, int sample_rate_hz);

}  // namespace ttscorpus::audio
