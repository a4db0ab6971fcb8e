#include "ttscorpus/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ttscorpus::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) throw TruncatedFileError(what, bytes_.size());
  }
  std::uint16_t u16() {
    require(2, "unexpected end of file");
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[offset_] | (bytes_[offset_ + 1] << 8));
    offset_ += 2;
    return v;
  }
  std::uint32_t u32() {
    require(4, "unexpected end of file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[offset_ + static_cast<std::size_t>(i)];
    offset_ += 4;
    return v;
  }
  std::string tag() {
    require(4, "unexpected end of file");
    std::string t(reinterpret_cast<const char*>(bytes_.data() + offset_), 4);
    offset_ += 4;
    return t;
  }
  void skip(std::size_t n) { offset_ = std::min(offset_ + n, bytes_.size()); }
  std::span<const std::uint8_t> view(std::size_t n) const { return bytes_.subspan(offset_, n); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
};

double read_sample(const std::uint8_t* p, const Format& f) {
  switch (f.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
      if (f.tag == kFormatFloat) {
        float x;
        std::memcpy(&x, &raw, sizeof x);
        return std::isfinite(x) ? x : 0.0;
      }
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
    case 64: {
      std::uint64_t raw = 0;
      for (int i = 7; i >= 0; --i) raw = (raw << 8) | p[i];
      double x;
      std::memcpy(&x, &raw, sizeof x);
      return std::isfinite(x) ? x : 0.0;
    }
    default:
      return 0.0;
  }
}

void validate_format(const Format& f) {
  if (f.tag != kFormatPcm && f.tag != kFormatFloat) {
    throw UnsupportedCodecError("unsupported WAV format tag " + std::to_string(f.tag));
  }
  const bool int_ok = f.tag == kFormatPcm && (f.bits == 8 || f.bits == 16 || f.bits == 24 ||
                                              f.bits == 32);
  const bool float_ok = f.tag == kFormatFloat && (f.bits == 32 || f.bits == 64);
  if (!int_ok && !float_ok) {
    throw UnsupportedCodecError("unsupported bit depth " + std::to_string(f.bits));
  }
  if (f.channels == 0) throw UnsupportedCodecError("WAV declares zero channels");
  if (f.sample_rate == 0) throw UnsupportedCodecError("WAV declares zero sample rate");
  if (f.block_align != f.channels * (f.bits / 8)) {
    throw UnsupportedCodecError("inconsistent WAV block alignment");
  }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::int16_t quantize16(float x) {
  const double scaled = std::round(static_cast<double>(x) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

AudioBuffer decode_wav_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 12) throw TruncatedFileError("file too short for a RIFF header", bytes.size());
  const std::string riff = r.tag();
  if (riff != "RIFF") throw UnsupportedCodecError("not a RIFF container");
  r.u32();
  if (r.tag() != "WAVE") throw UnsupportedCodecError("RIFF form is not WAVE");

  Format fmt;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::size_t chunk_offset = r.offset();
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw UnsupportedCodecError("fmt chunk too small");
      if (r.remaining() < size) {
        throw TruncatedFileError("fmt chunk truncated", bytes.size());
      }
      const std::size_t body = r.offset();
      fmt.tag = r.u16();
      fmt.channels = r.u16();
      fmt.sample_rate = r.u32();
      r.u32();
      fmt.block_align = r.u16();
      fmt.bits = r.u16();
      if (fmt.tag == kFormatExtensible) {
        if (size < 40) throw UnsupportedCodecError("extensible fmt chunk too small");
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        fmt.tag = r.u16();  // first two bytes of the sub-format GUID
      }
      r.skip(size - (r.offset() - body));
      if (size % 2 == 1 && r.remaining() > 0) r.skip(1);
      validate_format(fmt);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw UnsupportedCodecError("data chunk precedes fmt chunk");
      if (r.remaining() < size) {
        throw TruncatedFileError("data chunk declares " + std::to_string(size) +
                                     " bytes but file ends early",
                                 bytes.size());
      }
      if (size % fmt.block_align != 0) {
        throw TruncatedFileError("data chunk ends mid-frame",
                                 chunk_offset + 8 + size - size % fmt.block_align);
      }
      const std::size_t frames = size / fmt.block_align;
      const auto data = r.view(size);
      const std::size_t bytes_per_sample = fmt.bits / 8;
      std::vector<float> mono(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt.channels; ++c) {
          acc += read_sample(data.data() + i * fmt.block_align + c * bytes_per_sample, fmt);
        }
        mono[i] = static_cast<float>(std::clamp(acc / fmt.channels, -1.0, 1.0));
      }
      return AudioBuffer(std::move(mono), static_cast<int>(fmt.sample_rate));
    } else {
      if (r.remaining() < size) {
        throw TruncatedFileError("chunk '" + id + "' truncated", bytes.size());
      }
      r.skip(size + (size % 2));
    }
  }
  throw TruncatedFileError("no data chunk found", bytes.size());
}

AudioBuffer decode(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AudioError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav_bytes(bytes);
}

std::vector<std::uint8_t> encode_wav16_interleaved(std::span<const float> interleaved,
                                                   int channels, int sample_rate_hz) {
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz * channels * 2));
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (float x : interleaved) put_u16(out, static_cast<std::uint16_t>(quantize16(x)));
  return out;
}

std::vector<std::uint8_t> encode_wav16(const AudioBuffer& buffer) {
  return encode_wav16_interleaved(buffer.samples(), 1, buffer.sample_rate_hz());
}

void write_wav16(const std::filesystem::path& path, const AudioBuffer& buffer) {
  const auto bytes = encode_wav16(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw AudioError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw AudioError("short write to " + path.string());
}

std::vector<std::uint8_t> to_pcm16le(const AudioBuffer& buffer) {
  std::vector<std::uint8_t> out;
  out.reserve(buffer.size() * 2);
  for (float x : buffer.samples()) put_u16(out, static_cast<std::uint16_t>(quantize16(x)));
  return out;
}

AudioBuffer from_pcm16le(std::span<const std::uint8_t> bytes, int sample_rate_hz) {
  if (bytes.size() % 2 != 0) throw TruncatedFileError("odd PCM byte count", bytes.size() - 1);
  std::vector<float> samples(bytes.size() / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto v = static_cast<std::int16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    samples[i] = static_cast<float>(v / 32768.0);
  }
  return AudioBuffer(std::move(samples), sample_rate_hz);
}

}  // namespace ttscorpus::audio
