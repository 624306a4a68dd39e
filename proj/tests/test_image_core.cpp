#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fabricvision/image.hpp"
#include "fixtures.hpp"

using namespace fabricvision;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path dir = fs::temp_directory_path() / "fabricvision_image_tests";
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void push_le32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 24) & 0xff));
}

void push_le16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
}

// Minimal BMP writer for test inputs. rows are top-to-bottom RGB triples
// (or palette indices for bit_count 8).
std::vector<unsigned char> make_bmp(int width, int height, int bit_count,
                                    const std::vector<unsigned char>& pixels,
                                    std::uint32_t compression = 0,
                                    bool gray_palette = true) {
    const int bytes_per_px = bit_count / 8;
    const std::size_t row_bytes = (static_cast<std::size_t>(width) * bytes_per_px + 3) & ~std::size_t{3};
    const std::uint32_t palette_bytes = bit_count == 8 ? 256 * 4 : 0;
    const std::uint32_t offset = 54 + palette_bytes;
    const std::uint32_t file_size = offset + static_cast<std::uint32_t>(row_bytes * height);

    std::vector<unsigned char> b;
    b.push_back('B');
    b.push_back('M');
    push_le32(b, file_size);
    push_le32(b, 0);
    push_le32(b, offset);
    push_le32(b, 40);
    push_le32(b, static_cast<std::uint32_t>(width));
    push_le32(b, static_cast<std::uint32_t>(height));
    push_le16(b, 1);
    push_le16(b, static_cast<std::uint16_t>(bit_count));
    push_le32(b, compression);
    push_le32(b, 0);
    push_le32(b, 2835);
    push_le32(b, 2835);
    push_le32(b, 0);
    push_le32(b, 0);
    if (bit_count == 8) {
        for (int i = 0; i < 256; ++i) {
            const unsigned char g = static_cast<unsigned char>(i);
            b.push_back(g);
            b.push_back(gray_palette ? g : static_cast<unsigned char>((i + 1) % 256));
            b.push_back(g);
            b.push_back(0);
        }
    }
    // BMP stores rows bottom-up, padded to 4-byte multiples.
    for (int r = height - 1; r >= 0; --r) {
        std::size_t pushed = 0;
        for (int x = 0; x < width * bytes_per_px; ++x, ++pushed) {
            b.push_back(pixels[static_cast<std::size_t>(r) * width * bytes_per_px + x]);
        }
        while (pushed < row_bytes) {
            b.push_back(0);
            ++pushed;
        }
    }
    return b;
}

}  // namespace

TEST_CASE("P2 parsing") {
    const fs::path path = tmp_dir() / "tiny.pgm";
    std::ofstream(path) << "P2\n# comment line\n2 2\n255\n0 0 0 0\n";
    const GrayImage img = load_image(path.string());
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    for (double v : img.data()) CHECK(v == 0.0);
}

TEST_CASE("P5 save/load round trip within half a gray level") {
    const fs::path path = tmp_dir() / "roundtrip.pgm";

    GrayImage zeros(4, 4, 0.0);
    save_image(zeros, path.string());
    const GrayImage reloaded = load_image(path.string());
    for (double v : reloaded.data()) CHECK(v == 0.0);

    const GrayImage img = fixtures::random_image(17, 9, 7);
    save_image(img, path.string());
    const GrayImage back = load_image(path.string());
    REQUIRE(back.width() == img.width());
    REQUIRE(back.height() == img.height());
    CHECK(fixtures::max_abs_diff(img, back) <= 0.5);
}

TEST_CASE("save rounds half away from zero and clamps") {
    const fs::path path = tmp_dir() / "clamp.pgm";
    GrayImage img(3, 1);
    img.at(0, 0) = 254.6;
    img.at(1, 0) = -3.0;
    img.at(2, 0) = 97.5;
    save_image(img, path.string());
    const GrayImage back = load_image(path.string());
    CHECK(back.at(0, 0) == 255.0);
    CHECK(back.at(1, 0) == 0.0);
    CHECK(back.at(2, 0) == 98.0);
}

TEST_CASE("24-bit BMP converts to luma") {
    const fs::path path = tmp_dir() / "rgb.bmp";
    // Two pixels in one row: white and (R=100, G=200, B=50); file order BGR.
    const std::vector<unsigned char> px = {255, 255, 255, /* B,G,R */ 50, 200, 100};
    write_bytes(path, make_bmp(2, 1, 24, px));
    const GrayImage img = load_image(path.string());
    CHECK(img.at(0, 0) == 255.0);
    CHECK(img.at(1, 0) == doctest::Approx(0.299 * 100 + 0.587 * 200 + 0.114 * 50).epsilon(1e-12));
    CHECK(img.at(1, 0) == doctest::Approx(153.0).epsilon(1e-9));
}

TEST_CASE("24-bit BMP luma stays within channel range") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const unsigned char r = static_cast<unsigned char>(gen() % 256);
        const unsigned char g = static_cast<unsigned char>(gen() % 256);
        const unsigned char b = static_cast<unsigned char>(gen() % 256);
        const fs::path path = tmp_dir() / "luma.bmp";
        write_bytes(path, make_bmp(1, 1, 24, {b, g, r}));
        const double v = load_image(path.string()).at(0, 0);
        CHECK(v >= std::min({r, g, b}));
        CHECK(v <= std::max({r, g, b}));
    }
}

TEST_CASE("8-bit gray-palette BMP loads; colored palette is rejected") {
    const fs::path ok = tmp_dir() / "pal.bmp";
    write_bytes(ok, make_bmp(2, 2, 8, {0, 64, 128, 255}));
    const GrayImage img = load_image(ok.string());
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(1, 0) == 64.0);
    CHECK(img.at(0, 1) == 128.0);
    CHECK(img.at(1, 1) == 255.0);

    const fs::path bad = tmp_dir() / "colorpal.bmp";
    write_bytes(bad, make_bmp(2, 2, 8, {0, 64, 128, 255}, 0, /*gray_palette=*/false));
    CHECK_THROWS_AS(load_image(bad.string()), FormatError);
}

TEST_CASE("compressed BMP is rejected with the offending field named") {
    const fs::path path = tmp_dir() / "rle.bmp";
    write_bytes(path, make_bmp(2, 1, 8, {0, 0}, /*compression=*/1));
    try {
        load_image(path.string());
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("biCompression") != std::string::npos);
    }
}

TEST_CASE("unsupported formats and missing files") {
    CHECK_THROWS_AS(load_image((tmp_dir() / "nope.pgm").string()), IoError);

    const fs::path p3 = tmp_dir() / "p3.pgm";
    std::ofstream(p3) << "P3\n1 1\n255\n0 0 0\n";
    CHECK_THROWS_AS(load_image(p3.string()), FormatError);

    const fs::path deep = tmp_dir() / "deep.pgm";
    std::ofstream(deep) << "P2\n1 1\n65535\n1234\n";
    try {
        load_image(deep.string());
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("maxval") != std::string::npos);
    }
}

TEST_CASE("noise: zero sigma and determinism") {
    const GrayImage img = fixtures::random_image(8, 8, 11);

    const GrayImage same = add_gaussian_noise(img, NoiseSpec{0.0, 99});
    CHECK(fixtures::max_abs_diff(img, same) == 0.0);

    const GrayImage a = add_gaussian_noise(img, NoiseSpec{5.0, 123});
    const GrayImage b = add_gaussian_noise(img, NoiseSpec{5.0, 123});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);

    const GrayImage c = add_gaussian_noise(img, NoiseSpec{5.0, 124});
    CHECK(fixtures::max_abs_diff(a, c) > 0.0);
}

TEST_CASE("noise sample moments match the requested distribution") {
    const GrayImage base(256, 256, 128.0);
    const GrayImage noisy = add_gaussian_noise(base, NoiseSpec{10.0, 2024});

    double mean = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) mean += noisy.data()[i] - base.data()[i];
    mean /= static_cast<double>(noisy.size());

    double var = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double d = noisy.data()[i] - base.data()[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(noisy.size());

    CHECK(std::abs(mean) <= 0.5);
    CHECK(std::abs(std::sqrt(var) - 10.0) <= 0.5);
}

TEST_CASE("noise output is not clamped") {
    const GrayImage base(64, 64, 1.0);
    const GrayImage noisy = add_gaussian_noise(base, NoiseSpec{50.0, 5});
    bool below_zero = false;
    for (double v : noisy.data()) below_zero = below_zero || v < 0.0;
    CHECK(below_zero);
}

TEST_CASE("GrayImage validation") {
    CHECK_THROWS_AS(GrayImage(0, 4), ArgumentError);
    CHECK_THROWS_AS(GrayImage(4, -1), ArgumentError);
}
