#include "sspiv/signal.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sspiv {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct Reader {
  const std::uint8_t* p;
  std::size_t left;

  void need(std::size_t n) const {
    if (left < n) throw std::runtime_error("truncated WAV file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(p[0]) | (p[1] << 8) | (p[2] << 16) |
                      (static_cast<std::uint32_t>(p[3]) << 24);
    p += 4;
    left -= 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    left -= 2;
    return v;
  }
  void skip(std::size_t n) {
    need(n);
    p += n;
    left -= n;
  }
  bool tag(const char* t) {
    need(4);
    return std::memcmp(p, t, 4) == 0;
  }
};

double decode_sample(const std::uint8_t* s, std::uint16_t fmt, int bits) {
  if (fmt == kFormatFloat) {
    float f;
    std::memcpy(&f, s, 4);
    return static_cast<double>(f);
  }
  switch (bits) {
    case 16: {
      std::int16_t v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = (s[0] << 8) | (s[1] << 16) | (static_cast<std::int32_t>(s[2]) << 24);
      return (v >> 8) / 8388608.0;
    }
    case 32: {
      std::int32_t v;
      std::memcpy(&v, s, 4);
      return v / 2147483648.0;
    }
    default:
      throw std::runtime_error("unsupported PCM bit depth: " + std::to_string(bits));
  }
}

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
  s.push_back(static_cast<char>((v >> 16) & 0xFF));
  s.push_back(static_cast<char>((v >> 24) & 0xFF));
}
void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

void validate_signal(const MultichannelSignal& sig) {
  if (sig.channels.empty()) throw std::invalid_argument("signal has no channels");
  if (!(sig.sample_rate > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  for (const auto& ch : sig.channels) {
    if (ch.size() != sig.channels[0].size()) {
      throw std::invalid_argument("channels have unequal lengths");
    }
  }
}

MultichannelSignal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r{reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()};
  if (!r.tag("RIFF")) throw std::runtime_error("not a RIFF file: " + path);
  r.skip(4);
  r.u32();  // riff size, unreliable in the wild; chunk walk below bounds-checks
  if (!r.tag("WAVE")) throw std::runtime_error("not a WAVE file: " + path);
  r.skip(4);

  std::uint16_t fmt = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;

  while (r.left >= 8) {
    char id[4];
    std::memcpy(id, r.p, 4);
    r.skip(4);
    std::uint32_t len = r.u32();
    if (len > r.left) throw std::runtime_error("truncated WAV chunk: " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      Reader f{r.p, len};
      fmt = f.u16();
      channels = f.u16();
      rate = f.u32();
      f.u32();  // byte rate
      f.u16();  // block align
      bits = f.u16();
      if (fmt == kFormatExtensible) {
        f.u16();  // cbSize
        f.u16();  // valid bits
        f.u32();  // channel mask
        fmt = f.u16();  // first two bytes of SubFormat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = r.p;
      data_len = len;
    }
    r.skip(len + (len & 1));  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr) throw std::runtime_error("missing fmt/data chunk: " + path);
  if (channels == 0 || rate == 0) throw std::runtime_error("invalid WAV header: " + path);
  if (fmt == kFormatFloat && bits != 32) {
    throw std::runtime_error("only 32-bit float WAV supported: " + path);
  }
  if (fmt != kFormatFloat && fmt != kFormatPcm) {
    throw std::runtime_error("unsupported WAV codec " + std::to_string(fmt) + ": " + path);
  }
  if (fmt == kFormatPcm && bits != 16 && bits != 24 && bits != 32) {
    throw std::runtime_error("unsupported PCM depth " + std::to_string(bits) + ": " + path);
  }

  const std::size_t bytes_per = bits / 8;
  const std::size_t frame_bytes = bytes_per * channels;
  const std::size_t frames = data_len / frame_bytes;

  MultichannelSignal sig;
  sig.sample_rate = rate;
  sig.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t t = 0; t < frames; ++t) {
    const std::uint8_t* row = data + t * frame_bytes;
    for (std::uint16_t c = 0; c < channels; ++c) {
      sig.channels[c][t] = decode_sample(row + c * bytes_per, fmt, bits);
    }
  }
  return sig;
}

void write_wav_float32(const std::string& path, const MultichannelSignal& sig) {
  validate_signal(sig);
  const std::uint16_t channels = static_cast<std::uint16_t>(sig.num_channels());
  const std::uint32_t rate = static_cast<std::uint32_t>(sig.sample_rate);
  const std::size_t frames = sig.num_samples();
  const std::uint32_t data_len = static_cast<std::uint32_t>(frames * channels * 4);

  std::string out;
  out.reserve(data_len + 64);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatFloat);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 4);
  put_u16(out, static_cast<std::uint16_t>(channels * 4));
  put_u16(out, 32);
  out += "data";
  put_u32(out, data_len);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const float f = static_cast<float>(sig.channels[c][t]);
      char b[4];
      std::memcpy(b, &f, 4);
      out.append(b, 4);
    }
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write WAV file: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw std::runtime_error("short write to WAV file: " + path);
}

}  // namespace sspiv
