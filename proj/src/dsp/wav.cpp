#include "dnskit/dsp/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace dnskit::dsp {

namespace {

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

double quantize16(double x) {
  long v = std::lround(x * 32768.0);
  if (v > 32767) v = 32767;
  if (v < -32768) v = -32768;
  return static_cast<double>(v) / 32768.0;
}

Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open WAV file: ", path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  require(bytes.size() >= 44, "truncated WAV file: ", path);
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          "not a RIFF/WAVE file: ", path);

  FmtChunk fmt;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = rd_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      require(body + 16 <= bytes.size(), "truncated fmt chunk: ", path);
      fmt.format = rd_u16(bytes.data() + body);
      fmt.channels = rd_u16(bytes.data() + body + 2);
      fmt.sample_rate = rd_u32(bytes.data() + body + 4);
      fmt.bits = rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  require(have_fmt && data_off != 0, "missing fmt/data chunk: ", path);
  require(fmt.format == 1, path, ": only PCM WAV is supported (format tag ",
          fmt.format, ")");
  require(fmt.bits == 16, path, ": only 16-bit PCM is supported, got ",
          fmt.bits, " bits");
  require(fmt.channels == 1, path, ": only mono is supported, got ",
          fmt.channels, " channels");
  require(fmt.sample_rate == static_cast<std::uint32_t>(kSampleRate), path,
          ": only ", kSampleRate, " Hz is supported, got ", fmt.sample_rate,
          " Hz");
  require(data_off + data_len <= bytes.size(), "truncated data chunk: ", path);

  const std::size_t n = data_len / 2;
  Waveform w;
  w.sample_rate = kSampleRate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t s = static_cast<std::int16_t>(
        rd_u16(bytes.data() + data_off + 2 * i));
    w.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  require(w.sample_rate == kSampleRate, "write_wav expects ", kSampleRate,
          " Hz, got ", w.sample_rate);
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot open for writing: ", path);

  const std::uint32_t data_len = static_cast<std::uint32_t>(w.size() * 2);
  const std::uint32_t riff_len = 36 + data_len;
  const std::uint32_t rate = static_cast<std::uint32_t>(kSampleRate);
  const std::uint32_t byte_rate = rate * 2;

  auto wr_u32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    os.write(b, 4);
  };
  auto wr_u16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    os.write(b, 2);
  };

  os.write("RIFF", 4);
  wr_u32(riff_len);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  wr_u32(16);
  wr_u16(1);  // PCM
  wr_u16(1);  // mono
  wr_u32(rate);
  wr_u32(byte_rate);
  wr_u16(2);   // block align
  wr_u16(16);  // bits
  os.write("data", 4);
  wr_u32(data_len);
  for (const double x : w.samples) {
    long v = std::lround(x * 32768.0);
    if (v > 32767) v = 32767;
    if (v < -32768) v = -32768;
    wr_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  os.close();
  require(os.good(), "write failed: ", path);
}

}  // namespace dnskit::dsp
