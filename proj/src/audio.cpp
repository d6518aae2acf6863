#include "sqbench/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace sqbench {

double rms(const AudioBuffer& buf) {
  if (buf.samples.empty()) throw Error("rms: empty buffer");
  double acc = 0.0;
  for (double s : buf.samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(buf.samples.size()));
}

std::optional<double> level_dbfs(const AudioBuffer& buf) {
  const double r = rms(buf);
  if (r == 0.0) return std::nullopt;
  return 20.0 * std::log10(r);
}

AudioBuffer normalize_to_dbfs(const AudioBuffer& buf, double target_db,
                              std::size_t* clipped_out) {
  const double r = rms(buf);
  if (r == 0.0) throw Error("normalize_to_dbfs: silent input");
  const double gain = std::pow(10.0, target_db / 20.0) / r;
  AudioBuffer out{std::vector<double>(buf.samples.size()), buf.sample_rate};
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    double s = buf.samples[i] * gain;
    if (s > 1.0) { s = 1.0; ++clipped; }
    else if (s < -1.0) { s = -1.0; ++clipped; }
    out.samples[i] = s;
  }
  if (clipped_out) *clipped_out = clipped;
  if (static_cast<double>(clipped) >
      kClipErrorFraction * static_cast<double>(buf.samples.size()))
    throw Error("normalize_to_dbfs: clipped " + std::to_string(clipped) +
                " of " + std::to_string(buf.samples.size()) + " samples");
  return out;
}

std::int16_t sample_to_int16(double x) {
  double v = x * 32768.0;
  v = v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5);
  if (v > 32767.0) v = 32767.0;
  if (v < -32768.0) v = -32768.0;
  return static_cast<std::int16_t>(v);
}

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_wav: cannot open " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw Error("read_wav: not a RIFF file: " + path);
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw Error("read_wav: not a WAVE file: " + path);

  int channels = 0, rate = 0, bits = 0, format = 0;
  std::vector<std::int16_t> raw;
  while (in.read(tag, 4)) {
    std::uint32_t chunk_size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = static_cast<int>(read_u32(in));
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (format != 1) throw Error("read_wav: not PCM encoded: " + path);
      if (bits != 16) throw Error("read_wav: not 16-bit: " + path);
      if (channels < 1) throw Error("read_wav: bad channel count: " + path);
      raw.resize(chunk_size / 2);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * 2));
      if (!in) throw Error("read_wav: truncated data chunk: " + path);
      break;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  if (format == 0) throw Error("read_wav: missing fmt chunk: " + path);
  if (raw.empty()) throw Error("read_wav: empty payload: " + path);

  const std::size_t frames = raw.size() / channels;
  AudioBuffer buf{std::vector<double>(frames), rate};
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c)
      acc += static_cast<double>(raw[i * channels + c]);
    buf.samples[i] = acc / (32768.0 * channels);
  }
  return buf;
}

void write_wav(const AudioBuffer& buf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_wav: cannot open " + path + " for writing");
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(buf.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (double s : buf.samples) {
    const std::int16_t q = sample_to_int16(s);
    const char b[2] = {char(q & 0xff), char((q >> 8) & 0xff)};
    out.write(b, 2);
  }
  if (!out) throw Error("write_wav: write failed: " + path);
}

AudioBuffer trim_silence(const AudioBuffer& buf, double threshold_db,
                         double frame_ms) {
  const std::size_t frame =
      std::max<std::size_t>(1, static_cast<std::size_t>(
          frame_ms * 1e-3 * buf.sample_rate + 0.5));
  const double threshold = std::pow(10.0, threshold_db / 20.0);
  const std::size_t n_frames = (buf.samples.size() + frame - 1) / frame;
  std::vector<bool> active(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * frame;
    const std::size_t end = std::min(start + frame, buf.samples.size());
    double acc = 0.0;
    for (std::size_t i = start; i < end; ++i) acc += buf.samples[i] * buf.samples[i];
    active[f] = std::sqrt(acc / static_cast<double>(end - start)) >= threshold;
  }
  std::size_t first = 0;
  while (first < n_frames && !active[first]) ++first;
  if (first == n_frames)
    throw Error("trim_silence: signal entirely below threshold");
  std::size_t last = n_frames - 1;
  while (last > first && !active[last]) --last;
  const std::size_t begin = first * frame;
  const std::size_t end = std::min((last + 1) * frame, buf.samples.size());
  return {std::vector<double>(buf.samples.begin() + begin,
                              buf.samples.begin() + end),
          buf.sample_rate};
}

}  // namespace sqbench
