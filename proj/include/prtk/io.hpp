#pragma once

// On-disk formats.
//
// Array file ("PRTK01"), little-endian throughout:
//   bytes 0..5   magic "PRTK01"
//   byte  6      dtype: 0x01 real f64, 0x02 complex f64 (re, im interleaved)
//   byte  7      reserved, must be 0
//   bytes 8..15  rows (u64)
//   bytes 16..23 cols (u64)
//   payload      rows * cols * (1 or 2) f64 values, row-major
// Non-finite payload values are rejected on read.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prtk/colormap.hpp"
#include "prtk/decoder.hpp"
#include "prtk/grid.hpp"
#include "prtk/recovery.hpp"

namespace prtk::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr std::string_view kMagic = "PRTK01";
inline constexpr std::size_t kHeaderBytes = 24;

enum class DType : std::uint8_t { real = 0x01, complex = 0x02 };

struct ArrayData {
  DType dtype = DType::real;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> payload;  // complex: re, im interleaved

  std::size_t values_per_element() const { return dtype == DType::complex ? 2 : 1; }

  friend bool operator==(const ArrayData&, const ArrayData&) = default;
};

// --- raw bytes ----------------------------------------------------------------

namespace detail {

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void put_u32_be(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

}  // namespace detail

inline std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return bytes;
}

/// Writes to a sibling temporary file, then renames over `path`.
inline void write_bytes_atomic(const fs::path& path, const void* data, std::size_t size) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

inline void write_text_atomic(const fs::path& path, const std::string& text) {
  write_bytes_atomic(path, text.data(), text.size());
}

// --- array files --------------------------------------------------------------

inline std::vector<unsigned char> encode_array(const ArrayData& a) {
  if (a.payload.size() != a.rows * a.cols * a.values_per_element()) {
    throw ValidationError("array payload length does not match its shape");
  }
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + 8 * a.payload.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(static_cast<unsigned char>(a.dtype));
  out.push_back(0);
  detail::put_u64(out, a.rows);
  detail::put_u64(out, a.cols);
  for (double v : a.payload) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline ArrayData decode_array(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("array file shorter than its header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("bad array magic (expected PRTK01)");
  }
  ArrayData a;
  if (bytes[6] == 0x01) {
    a.dtype = DType::real;
  } else if (bytes[6] == 0x02) {
    a.dtype = DType::complex;
  } else {
    throw FormatError("unknown array dtype byte " + std::to_string(bytes[6]));
  }
  if (bytes[7] != 0) throw FormatError("reserved header byte must be zero");
  a.rows = detail::get_u64(bytes.data() + 8);
  a.cols = detail::get_u64(bytes.data() + 16);
  const std::uint64_t max_elems = (bytes.size() - kHeaderBytes) / 8;
  if (a.cols != 0 && a.rows > max_elems / a.cols) {
    throw FormatError("array payload truncated");
  }
  const std::uint64_t count = a.rows * a.cols * a.values_per_element();
  if (count != max_elems || (bytes.size() - kHeaderBytes) % 8 != 0) {
    throw FormatError(count > max_elems ? "array payload truncated"
                                        : "array file has trailing bytes");
  }
  a.payload.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double v = std::bit_cast<double>(detail::get_u64(bytes.data() + kHeaderBytes + 8 * i));
    if (!std::isfinite(v)) throw FormatError("array payload contains NaN or Inf");
    a.payload[i] = v;
  }
  return a;
}

inline void write_array(const fs::path& path, const ArrayData& a) {
  const auto bytes = encode_array(a);
  write_bytes_atomic(path, bytes.data(), bytes.size());
}

inline ArrayData read_array(const fs::path& path) { return decode_array(read_bytes(path)); }

inline ArrayData to_array(const ComplexImage& x) {
  ArrayData a{DType::complex, x.side(), x.side(), {}};
  a.payload.reserve(2 * x.size());
  for (const auto& v : x) {
    a.payload.push_back(v.real());
    a.payload.push_back(v.imag());
  }
  return a;
}

inline ArrayData to_array(const DiffractionPattern& y) {
  return {DType::real, y.side(), y.side(), y.vector()};
}

inline ArrayData to_array(std::span<const double> values, std::uint64_t rows, std::uint64_t cols) {
  return {DType::real, rows, cols, std::vector<double>(values.begin(), values.end())};
}

/// Square complex image; real arrays are promoted with zero imaginary part.
inline ComplexImage to_complex_image(const ArrayData& a) {
  if (a.rows != a.cols || a.rows == 0) throw DimensionError("image arrays must be square");
  std::vector<cplx> data(a.rows * a.cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = a.dtype == DType::complex ? cplx(a.payload[2 * i], a.payload[2 * i + 1])
                                        : cplx(a.payload[i], 0.0);
  }
  return ComplexImage(a.rows, std::move(data));
}

inline DiffractionPattern to_pattern(const ArrayData& a) {
  if (a.dtype != DType::real) throw ValidationError("measurement arrays must be real");
  if (a.rows != a.cols || a.rows == 0) throw DimensionError("measurement arrays must be square");
  return DiffractionPattern(a.rows, a.payload);
}

inline SupportMask to_mask(const ArrayData& a) {
  if (a.dtype != DType::real || a.rows != a.cols) throw ValidationError("masks are square real");
  SupportMask m(a.rows);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.payload[i] != 0.0 ? 1 : 0;
  return m;
}

// --- CSV / JSON ---------------------------------------------------------------

inline std::string trace_csv(const LossTrace& trace) {
  std::string out = "iter,loss,elapsed_ms\n";
  char buf[96];
  for (const auto& tp : trace) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.3f\n", static_cast<unsigned long long>(tp.iter),
                  tp.loss, tp.elapsed_ms);
    out += buf;
  }
  return out;
}

inline void write_json(const fs::path& path, const json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

inline json read_json(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw FormatError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

// --- PNG ----------------------------------------------------------------------

namespace detail {

inline void png_chunk(std::vector<unsigned char>& out, const char* type,
                      const std::vector<unsigned char>& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

/// Encodes 8-bit gray (channels = 1) or RGB (channels = 3) pixels as PNG.
inline std::vector<unsigned char> encode_png(std::size_t width, std::size_t height,
                                             std::size_t channels,
                                             const std::vector<unsigned char>& pixels) {
  if (width == 0 || height == 0) throw ValidationError("cannot encode an empty image");
  if (pixels.size() != width * height * channels) throw ValidationError("png pixel count");
  std::vector<unsigned char> raw;
  raw.reserve(height * (1 + width * channels));
  for (std::size_t r = 0; r < height; ++r) {
    raw.push_back(0);  // filter: none
    const auto* row = pixels.data() + r * width * channels;
    raw.insert(raw.end(), row, row + width * channels);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw IoError("zlib compression failed");
  }
  z.resize(zlen);

  std::vector<unsigned char> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<unsigned char> ihdr;
  detail::put_u32_be(ihdr, static_cast<std::uint32_t>(width));
  detail::put_u32_be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);                                          // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);                      // gray / RGB
  ihdr.insert(ihdr.end(), {0, 0, 0});                         // deflate, adaptive, no interlace
  detail::png_chunk(out, "IHDR", ihdr);
  detail::png_chunk(out, "IDAT", z);
  detail::png_chunk(out, "IEND", {});
  return out;
}

struct RenderedImages {
  std::vector<unsigned char> magnitude_png;
  std::vector<unsigned char> phase_png;
};

/// Magnitude: linear [0, max|x|] -> [0, 255] gray. Phase: [-pi, pi) through
/// kPhaseColormap.
inline RenderedImages render_images(const ComplexImage& x) {
  if (x.empty()) throw ValidationError("cannot render an empty image");
  if (!x.all_finite()) throw ValidationError("cannot render a non-finite image");
  double peak = 0.0;
  for (const auto& v : x) peak = std::max(peak, std::abs(v));

  std::vector<unsigned char> gray(x.size());
  std::vector<unsigned char> rgb(3 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    gray[i] = peak > 0.0 ? static_cast<unsigned char>(std::lround(255.0 * mag / peak)) : 0;
    const double t = (std::arg(x[i]) + std::numbers::pi) / (2.0 * std::numbers::pi);
    const auto idx = static_cast<std::size_t>(256.0 * t) % 256;  // +pi wraps to -pi
    const auto& color = kPhaseColormap[idx];
    std::copy(color.begin(), color.end(), rgb.begin() + 3 * static_cast<std::ptrdiff_t>(i));
  }
  return {encode_png(x.side(), x.side(), 1, gray), encode_png(x.side(), x.side(), 3, rgb)};
}

inline void render_png(const ComplexImage& x, const fs::path& mag_path, const fs::path& phase_path) {
  const auto imgs = render_images(x);
  write_bytes_atomic(mag_path, imgs.magnitude_png.data(), imgs.magnitude_png.size());
  write_bytes_atomic(phase_path, imgs.phase_png.data(), imgs.phase_png.size());
}

// --- decoder checkpoints --------------------------------------------------------

inline json to_json(const decoder::DecoderConfig& cfg) {
  return json{{"num_layers", cfg.num_layers},
              {"channels", cfg.channels},
              {"seed_side", cfg.seed_side},
              {"output_mode", decoder::to_string(cfg.output_mode)},
              {"norm_epsilon", cfg.norm_epsilon}};
}

/// Missing keys keep their defaults from `base`.
inline decoder::DecoderConfig decoder_config_from_json(const json& j,
                                                       decoder::DecoderConfig base = {}) {
  try {
    if (j.contains("num_layers")) base.num_layers = j.at("num_layers").get<std::size_t>();
    if (j.contains("channels")) base.channels = j.at("channels").get<std::size_t>();
    if (j.contains("seed_side")) base.seed_side = j.at("seed_side").get<std::size_t>();
    if (j.contains("output_mode")) {
      base.output_mode = decoder::output_mode_from_string(j.at("output_mode").get<std::string>());
    }
    if (j.contains("norm_epsilon")) base.norm_epsilon = j.at("norm_epsilon").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad decoder config: ") + e.what());
  }
  base.validate();
  return base;
}

/// One array per weight tensor plus decoder.json listing them.
inline void save_decoder(const fs::path& dir, const decoder::DecoderWeights& w,
                         const decoder::SeedTensor& z) {
  fs::create_directories(dir);
  const auto& cfg = w.config();
  const std::size_t k = cfg.channels;
  json files = json::object();
  auto put = [&](const std::string& name, std::span<const double> v, std::uint64_t rows,
                 std::uint64_t cols) {
    write_array(dir / (name + ".prtk"), to_array(v, rows, cols));
    files[name] = name + ".prtk";
  };
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    const auto p = "layer" + std::to_string(l);
    put(p + "_mixing", w.mixing(l), k, k);
    put(p + "_gain", w.gain(l), 1, k);
    put(p + "_bias", w.bias(l), 1, k);
  }
  put("output_mixing", w.output_mixing(), k, cfg.output_channels());
  put("output_bias", w.output_bias(), 1, cfg.output_channels());
  put("seed", z.values(), z.channels(), z.side() * z.side());
  write_json(dir / "decoder.json", json{{"config", to_json(cfg)}, {"arrays", files}});
}

inline decoder::DecoderInit load_decoder(const fs::path& dir) {
  const auto manifest = read_json(dir / "decoder.json");
  auto lookup = [&](const std::string& key, const std::string& name = "") -> const json& {
    try {
      return name.empty() ? manifest.at(key) : manifest.at(key).at(name);
    } catch (const json::exception&) {
      throw FormatError("decoder.json lacks '" + key + (name.empty() ? "" : "." + name) + "'");
    }
  };
  const auto cfg = decoder_config_from_json(lookup("config"));
  decoder::DecoderWeights w(cfg);
  auto get = [&](const std::string& name, std::span<double> dst) {
    const auto& file = lookup("arrays", name);
    if (!file.is_string()) throw FormatError("decoder.json entry '" + name + "' is not a path");
    const auto a = read_array(dir / file.get<std::string>());
    if (a.dtype != DType::real || a.payload.size() != dst.size()) {
      throw FormatError("checkpoint array '" + name + "' has the wrong shape");
    }
    std::copy(a.payload.begin(), a.payload.end(), dst.begin());
  };
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    const auto p = "layer" + std::to_string(l);
    get(p + "_mixing", w.mixing(l));
    get(p + "_gain", w.gain(l));
    get(p + "_bias", w.bias(l));
  }
  get("output_mixing", w.output_mixing());
  get("output_bias", w.output_bias());
  std::vector<double> seed(cfg.channels * cfg.seed_side * cfg.seed_side);
  get("seed", seed);
  return {std::move(w), decoder::SeedTensor(cfg.channels, cfg.seed_side, std::move(seed))};
}

}  // namespace prtk::io
