#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "flowsim/error.hpp"
#include "flowsim/image_io.hpp"
#include "flowsim/synth.hpp"
#include "test_util.hpp"

namespace flowsim {
namespace {

std::vector<std::byte> bytes_of(const std::string& s) {
  std::vector<std::byte> out(s.size());
  std::memcpy(out.data(), s.data(), s.size());
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

TEST(Pgm, DecodesAsciiExample) {
  const auto img = decode_image(bytes_of("P2\n2 2\n255\n0 255\n128 64\n"), ImageFormat::Pgm);
  EXPECT_EQ(img, GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 128, 64}));
}

TEST(Pgm, CommentsAndWhitespace) {
  const auto img =
      decode_image(bytes_of("P2 # comment\n# another\n 2\t1 255 7\n9"), ImageFormat::Pgm);
  EXPECT_EQ(img, GrayImage(2, 1, std::vector<std::uint8_t>{7, 9}));
}

TEST(Pgm, DecodesBinary) {
  std::string data = "P5\n3 1\n255\n";
  data += std::string("\x00\x80\xff", 3);
  const auto img = decode_image(bytes_of(data), ImageFormat::Pgm);
  EXPECT_EQ(img, GrayImage(3, 1, std::vector<std::uint8_t>{0, 128, 255}));
}

TEST(Pgm, WhiteImage) {
  const auto img = decode_image(bytes_of(encode_pgm(GrayImage(10, 10, 255))), ImageFormat::Pgm);
  for (auto v : img.pixels()) EXPECT_EQ(v, 255);
}

TEST(Pgm, RejectsOtherMaxval) {
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P2\n1 1\n65535\n0\n"), ImageFormat::Pgm); }),
            ErrorKind::UnsupportedFormat);
}

TEST(Pgm, RejectsMalformedInput) {
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P5\n4 4\n255\n\x01"), ImageFormat::Pgm); }),
            ErrorKind::MalformedImage);
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P2\n2 1\n255\n1\n"), ImageFormat::Pgm); }),
            ErrorKind::MalformedImage);
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P2\n2 1\n255\n1 300\n"), ImageFormat::Pgm); }),
            ErrorKind::MalformedImage);
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P3\n1 1\n255\n0 0 0\n"), ImageFormat::Pgm); }),
            ErrorKind::MalformedImage);
  EXPECT_EQ(kind_of([] { decode_image(bytes_of("P2\n0 3\n255\n"), ImageFormat::Pgm); }),
            ErrorKind::MalformedImage);
}

TEST(Pgm, RoundTripBothEncodings) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> v(0, 255);
  std::vector<std::uint8_t> lum(53 * 17);
  for (auto& p : lum) p = static_cast<std::uint8_t>(v(rng));
  const GrayImage img(53, 17, lum);
  for (auto enc : {PgmEncoding::Ascii, PgmEncoding::Binary}) {
    const auto text = encode_pgm(img, enc);
    EXPECT_EQ(decode_image(bytes_of(text), ImageFormat::Pgm), img);
  }
}

TEST(Pgm, AsciiLinesStayShort) {
  const auto text = encode_pgm(GrayImage(100, 3, 123), PgmEncoding::Ascii);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    EXPECT_LE(end - start, 70u);
    start = end + 1;
  }
}

TEST(Pgm, SynthRenderRoundTrip) {
  for (const auto& fig : generate_corpus(9, 3)) {
    const auto text = encode_pgm(fig.image);
    EXPECT_EQ(decode_image(bytes_of(text), ImageFormat::Pgm), fig.image);
  }
}

TEST(Format, DetectsByMagic) {
  EXPECT_EQ(detect_format(bytes_of("P5\n")), ImageFormat::Pgm);
  EXPECT_EQ(detect_format(bytes_of("P2 ")), ImageFormat::Pgm);
  EXPECT_EQ(detect_format(bytes_of("\x89PNG\r\n\x1a\n")), ImageFormat::Png);
  EXPECT_FALSE(detect_format(bytes_of("GIF89a")).has_value());
}

TEST(Files, WriteThenRead) {
  test::TempDir dir;
  const GrayImage img(4, 3, std::vector<std::uint8_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  write_pgm(img, dir.path() / "a.pgm");
  EXPECT_EQ(read_image(dir.path() / "a.pgm"), img);
  EXPECT_EQ(kind_of([&] { read_image(dir.path() / "missing.pgm"); }), ErrorKind::IoFailure);
  std::ofstream(dir.path() / "junk.pgm") << "hello";
  EXPECT_THROW(read_image(dir.path() / "junk.pgm"), Error);
}

TEST(Files, BinaryImageToGray) {
  BinaryImage b(2, 1);
  b.set(0, 0, true);
  const auto g = to_gray(b);
  EXPECT_EQ(g.at(0, 0), 0);
  EXPECT_EQ(g.at(1, 0), 255);
}

}  // namespace
}  // namespace flowsim
