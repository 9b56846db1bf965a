#include <gtest/gtest.h>

#include <unistd.h>
#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "prtk/io.hpp"

using namespace prtk;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("prtk_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

struct DecodedPng {
  std::uint32_t width = 0, height = 0;
  int color_type = -1;
  std::vector<unsigned char> pixels;  // filter bytes stripped
};

// Minimal reader for the files encode_png writes: one IDAT, filter 0 rows.
DecodedPng decode_png(const std::vector<unsigned char>& png) {
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  EXPECT_TRUE(std::equal(sig, sig + 8, png.begin()));
  DecodedPng out;
  std::vector<unsigned char> idat;
  for (std::size_t pos = 8; pos + 12 <= png.size();) {
    const std::uint32_t len = be32(&png[pos]);
    const std::string type(png.begin() + pos + 4, png.begin() + pos + 8);
    const auto* data = &png[pos + 8];
    const auto crc = crc32(0L, &png[pos + 4], len + 4);
    EXPECT_EQ(be32(data + len), crc) << type;
    if (type == "IHDR") {
      out.width = be32(data);
      out.height = be32(data + 4);
      out.color_type = data[9];
    } else if (type == "IDAT") {
      idat.assign(data, data + len);
    }
    pos += 12 + len;
  }
  const std::size_t channels = out.color_type == 2 ? 3 : 1;
  std::vector<unsigned char> raw(out.height * (1 + out.width * channels));
  uLongf rawlen = raw.size();
  EXPECT_EQ(uncompress(raw.data(), &rawlen, idat.data(), idat.size()), Z_OK);
  for (std::size_t r = 0; r < out.height; ++r) {
    const auto* row = &raw[r * (1 + out.width * channels)];
    EXPECT_EQ(row[0], 0);
    out.pixels.insert(out.pixels.end(), row + 1, row + 1 + out.width * channels);
  }
  return out;
}

}  // namespace

TEST(ArrayFile, RealRoundTripIsBitwise) {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (auto [rows, cols] : {std::pair{1, 1}, {3, 7}, {64, 64}, {1024, 1024}}) {
    io::ArrayData a{io::DType::real, static_cast<std::uint64_t>(rows),
                    static_cast<std::uint64_t>(cols), {}};
    for (int i = 0; i < rows * cols; ++i) a.payload.push_back(normal(rng));
    if (!a.payload.empty()) a.payload[0] = -0.0;
    const auto path = dir.path() / "a.prtk";
    io::write_array(path, a);
    const auto b = io::read_array(path);
    EXPECT_EQ(b.dtype, a.dtype);
    ASSERT_EQ(b.payload.size(), a.payload.size());
    EXPECT_EQ(std::memcmp(a.payload.data(), b.payload.data(), 8 * a.payload.size()), 0);
  }
}

TEST(ArrayFile, ComplexImageRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(2);
  const auto x = oracle::random_image(17, rng);
  io::write_array(dir.path() / "x.prtk", io::to_array(x));
  EXPECT_EQ(io::to_complex_image(io::read_array(dir.path() / "x.prtk")), x);
  EXPECT_FALSE(fs::exists(dir.path() / "x.prtk.tmp"));
}

TEST(ArrayFile, ByteLayout) {
  std::vector<double> v(16);
  for (int i = 0; i < 16; ++i) v[i] = i;
  const auto bytes = io::encode_array(io::to_array(v, 4, 4));
  ASSERT_EQ(bytes.size(), 152u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "PRTK01");
  EXPECT_EQ(bytes[6], 0x01);
  EXPECT_EQ(bytes[7], 0x00);
  EXPECT_EQ(bytes[8], 4);
  EXPECT_EQ(bytes[16], 4);
  for (int i = 9; i < 16; ++i) EXPECT_EQ(bytes[i], 0);
  // 1.0 = 0x3FF0000000000000, little-endian at element 1.
  EXPECT_EQ(bytes[24 + 8 + 7], 0x3F);
  EXPECT_EQ(bytes[24 + 8 + 6], 0xF0);

  const auto cbytes = io::encode_array(io::to_array(ComplexImage(2)));
  EXPECT_EQ(cbytes.size(), 24u + 2 * 4 * 8);
  EXPECT_EQ(cbytes[6], 0x02);
}

TEST(ArrayFile, RejectsCorruption) {
  const auto good = io::encode_array(io::to_array(std::vector<double>(16, 1.0), 4, 4));
  EXPECT_NO_THROW(io::decode_array(good));

  auto bad = good;
  bad[3] ^= 0xFF;
  EXPECT_THROW(io::decode_array(bad), FormatError);

  bad = good;
  bad.pop_back();
  EXPECT_THROW(io::decode_array(bad), FormatError);

  bad = good;
  bad.push_back(0);
  EXPECT_THROW(io::decode_array(bad), FormatError);

  bad = good;
  bad[6] = 7;
  EXPECT_THROW(io::decode_array(bad), FormatError);

  bad = good;
  bad[7] = 1;
  EXPECT_THROW(io::decode_array(bad), FormatError);

  bad = good;
  bad[15] = 0x10;  // absurd row count
  EXPECT_THROW(io::decode_array(bad), FormatError);

  EXPECT_THROW(io::decode_array({'P', 'R', 'T'}), FormatError);

  auto with_nan = io::to_array(std::vector<double>(4, 0.0), 2, 2);
  with_nan.payload[2] = std::nan("");
  EXPECT_THROW(io::decode_array(io::encode_array(with_nan)), FormatError);
  with_nan.payload[2] = -INFINITY;
  EXPECT_THROW(io::decode_array(io::encode_array(with_nan)), FormatError);
}

TEST(ArrayFile, MissingFileIsIoError) {
  TempDir dir;
  EXPECT_THROW(io::read_array(dir.path() / "nope.prtk"), IoError);
  EXPECT_THROW(io::write_array(dir.path() / "no_dir" / "a.prtk", io::to_array(ComplexImage(1))),
               IoError);
}

TEST(ArrayFile, Conversions) {
  const auto y = io::to_pattern(io::to_array(std::vector<double>{1, 2, 3, 4}, 2, 2));
  EXPECT_EQ(y(1, 0), 3.0);
  EXPECT_THROW(io::to_pattern(io::to_array(ComplexImage(2))), ValidationError);
  EXPECT_THROW(io::to_pattern(io::to_array(std::vector<double>{1, 2}, 1, 2)), DimensionError);
  EXPECT_THROW(io::to_pattern(io::to_array(std::vector<double>{1, -2, 3, 4}, 2, 2)),
               ValidationError);
  const auto x = io::to_complex_image(io::to_array(std::vector<double>{1, 2, 3, 4}, 2, 2));
  EXPECT_EQ(x(0, 1), cplx(2.0, 0.0));
  const auto mask = io::to_mask(io::to_array(std::vector<double>{0, 1, 0, 2}, 2, 2));
  EXPECT_EQ(mask.count(), 2u);
}

TEST(TraceCsv, Format) {
  const LossTrace t{{0, 1.5, 0.25}, {10, 0.1, 12.0}};
  EXPECT_EQ(io::trace_csv(t), "iter,loss,elapsed_ms\n0,1.5,0.250\n10,0.10000000000000001,12.000\n");
}

TEST(Json, InvalidIsFormatError) {
  TempDir dir;
  io::write_text_atomic(dir.path() / "bad.json", "{\"a\": ");
  EXPECT_THROW(io::read_json(dir.path() / "bad.json"), FormatError);
  io::write_json(dir.path() / "ok.json", io::json{{"b", 2}, {"a", 1}});
  const auto j = io::read_json(dir.path() / "ok.json");
  EXPECT_EQ(j.begin().key(), "b");
}

TEST(Png, DeterministicAndWellFormed) {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_image(9, rng);
  const auto a = io::render_images(x);
  const auto b = io::render_images(x);
  EXPECT_EQ(a.magnitude_png, b.magnitude_png);
  EXPECT_EQ(a.phase_png, b.phase_png);
  const auto mag = decode_png(a.magnitude_png);
  EXPECT_EQ(mag.width, 9u);
  EXPECT_EQ(mag.height, 9u);
  EXPECT_EQ(mag.color_type, 0);
  double peak = 0.0;
  for (const auto& v : x) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(mag.pixels[i], 255.0 * std::abs(x[i]) / peak, 0.5 + 1e-9);
  }
  const auto ph = decode_png(a.phase_png);
  EXPECT_EQ(ph.color_type, 2);
  ASSERT_EQ(ph.pixels.size(), 3 * x.size());
}

TEST(Png, UniformMagnitudeIsFlatWhite) {
  ComplexImage x(5);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::polar(2.0, 0.3 * static_cast<double>(i));
  const auto mag = decode_png(io::render_images(x).magnitude_png);
  for (auto p : mag.pixels) EXPECT_EQ(p, 255);
}

TEST(Png, PositiveRealImageUsesMiddleColour) {
  ComplexImage x(4);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 + static_cast<double>(i);
  const auto ph = decode_png(io::render_images(x).phase_png);
  const auto& mid = io::kPhaseColormap[128];
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(ph.pixels[3 * i], mid[0]);
    EXPECT_EQ(ph.pixels[3 * i + 1], mid[1]);
    EXPECT_EQ(ph.pixels[3 * i + 2], mid[2]);
  }
  // Negative reals (phase pi) wrap to the first entry.
  ComplexImage neg(1, std::vector<cplx>{cplx(-1.0, 0.0)});
  const auto pn = decode_png(io::render_images(neg).phase_png);
  EXPECT_EQ(pn.pixels[0], io::kPhaseColormap[0][0]);
}

TEST(Png, ZeroImageIsBlack) {
  const auto mag = decode_png(io::render_images(ComplexImage(3)).magnitude_png);
  for (auto p : mag.pixels) EXPECT_EQ(p, 0);
}

TEST(DecoderCheckpoint, RoundTrip) {
  TempDir dir;
  const decoder::DecoderConfig cfg{2, 5, 3, decoder::OutputMode::real_sigmoid, 1e-5};
  const auto init = decoder::init_decoder(cfg, 42);
  io::save_decoder(dir.path() / "ckpt", init.weights, init.seed);
  const auto back = io::load_decoder(dir.path() / "ckpt");
  EXPECT_EQ(back.weights.config(), cfg);
  const auto a = init.weights.flat();
  const auto b = back.weights.flat();
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  EXPECT_EQ(back.seed, init.seed);
  EXPECT_EQ(decoder::decoder_forward(back.weights, back.seed, cfg).image,
            decoder::decoder_forward(init.weights, init.seed, cfg).image);
}

TEST(DecoderCheckpoint, BrokenManifest) {
  TempDir dir;
  const decoder::DecoderConfig cfg{1, 2, 2, decoder::OutputMode::complex2ch, 1e-6};
  const auto init = decoder::init_decoder(cfg, 1);
  io::save_decoder(dir.path(), init.weights, init.seed);
  io::write_json(dir.path() / "decoder.json", io::json{{"config", io::to_json(cfg)}});
  EXPECT_THROW(io::load_decoder(dir.path()), FormatError);
  EXPECT_THROW(io::load_decoder(dir.path() / "missing"), IoError);
}

TEST(DecoderConfigJson, DefaultsAndValidation) {
  const auto cfg = io::decoder_config_from_json(io::json{{"channels", 16}});
  EXPECT_EQ(cfg.channels, 16u);
  EXPECT_EQ(cfg.num_layers, decoder::DecoderConfig{}.num_layers);
  EXPECT_THROW(io::decoder_config_from_json(io::json{{"channels", "many"}}), ValidationError);
  EXPECT_THROW(io::decoder_config_from_json(io::json{{"output_mode", "rgb"}}), ValidationError);
  EXPECT_THROW(io::decoder_config_from_json(io::json{{"channels", 0}}), ValidationError);
}
