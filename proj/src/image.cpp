#include "fabricvision/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fabricvision {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long kMaxDimension = 1 << 16;

double clamp255(double v) { return std::max(0.0, std::min(255.0, v)); }

double luma(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

// Skips whitespace and '#' comment lines in a PGM header.
void skip_pgm_separators(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

long read_pgm_int(std::istream& in, const char* field) {
    skip_pgm_separators(in);
    long v = 0;
    if (!(in >> v)) {
        throw FormatError(std::string("PGM: malformed header field '") + field + "'");
    }
    return v;
}

GrayImage load_pgm(std::ifstream& in, const std::string& path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    const bool ascii = magic[1] == '2';

    const long w = read_pgm_int(in, "width");
    const long h = read_pgm_int(in, "height");
    const long maxval = read_pgm_int(in, "maxval");
    if (w < 1 || h < 1 || w > kMaxDimension || h > kMaxDimension) {
        throw FormatError("PGM: dimensions " + std::to_string(w) + "x" + std::to_string(h) +
                          " out of range");
    }
    if (maxval != 255) {
        throw FormatError("PGM: unsupported maxval " + std::to_string(maxval) +
                          " (only 255)");
    }

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (ascii) {
        for (double& px : img.data()) {
            long v;
            if (!(in >> v)) throw FormatError("PGM: truncated P2 pixel data");
            if (v < 0 || v > maxval) {
                throw FormatError("PGM: P2 sample " + std::to_string(v) + " out of range");
            }
            px = static_cast<double>(v);
        }
    } else {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> raw(img.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
            throw FormatError("PGM: truncated P5 pixel data");
        }
        std::transform(raw.begin(), raw.end(), img.data().begin(),
                       [](unsigned char v) { return static_cast<double>(v); });
    }
    (void)path;
    return img;
}

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

GrayImage load_bmp(std::ifstream& in) {
    unsigned char header[54];
    in.read(reinterpret_cast<char*>(header), 54);
    if (in.gcount() != 54) throw FormatError("BMP: truncated file header");

    const std::uint32_t data_offset = le32(header + 10);
    const std::uint32_t info_size = le32(header + 14);
    if (info_size < 40) {
        throw FormatError("BMP: unsupported biSize " + std::to_string(info_size));
    }
    const std::int32_t width = static_cast<std::int32_t>(le32(header + 18));
    std::int32_t height = static_cast<std::int32_t>(le32(header + 22));
    const std::uint16_t bit_count = le16(header + 28);
    const std::uint32_t compression = le32(header + 30);
    std::uint32_t colors_used = le32(header + 46);

    if (compression != 0) {
        throw FormatError("BMP: unsupported biCompression " + std::to_string(compression) +
                          " (only BI_RGB)");
    }
    if (bit_count != 8 && bit_count != 24) {
        throw FormatError("BMP: unsupported biBitCount " + std::to_string(bit_count));
    }
    const bool top_down = height < 0;
    if (top_down) height = -height;
    if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension) {
        throw FormatError("BMP: dimensions out of range");
    }

    std::vector<double> palette;  // gray value per palette index
    if (bit_count == 8) {
        if (colors_used == 0) colors_used = 256;
        if (colors_used > 256) {
            throw FormatError("BMP: biClrUsed " + std::to_string(colors_used) + " exceeds 256");
        }
        in.seekg(14 + static_cast<std::streamoff>(info_size));
        std::vector<unsigned char> quads(colors_used * 4);
        in.read(reinterpret_cast<char*>(quads.data()), static_cast<std::streamsize>(quads.size()));
        if (static_cast<std::size_t>(in.gcount()) != quads.size()) {
            throw FormatError("BMP: truncated color table");
        }
        palette.resize(colors_used);
        for (std::uint32_t i = 0; i < colors_used; ++i) {
            const unsigned char b = quads[i * 4 + 0];
            const unsigned char g = quads[i * 4 + 1];
            const unsigned char r = quads[i * 4 + 2];
            if (r != g || g != b) {
                throw FormatError("BMP: color table entry " + std::to_string(i) +
                                  " is not gray (R==G==B required)");
            }
            palette[i] = static_cast<double>(r);
        }
    }

    const int bytes_per_px = bit_count / 8;
    const std::size_t row_bytes = (static_cast<std::size_t>(width) * bytes_per_px + 3) & ~std::size_t{3};
    in.seekg(static_cast<std::streamoff>(data_offset));

    GrayImage img(width, height);
    std::vector<unsigned char> row(row_bytes);
    for (int r = 0; r < height; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_bytes));
        if (static_cast<std::size_t>(in.gcount()) != row_bytes) {
            throw FormatError("BMP: truncated pixel data");
        }
        const int y = top_down ? r : height - 1 - r;  // file rows are bottom-up by default
        for (int x = 0; x < width; ++x) {
            if (bit_count == 24) {
                const double b = row[x * 3 + 0];
                const double g = row[x * 3 + 1];
                const double rr = row[x * 3 + 2];
                img.at(x, y) = luma(rr, g, b);
            } else {
                const unsigned char idx = row[x];
                if (idx >= palette.size()) {
                    throw FormatError("BMP: pixel index " + std::to_string(idx) +
                                      " outside color table");
                }
                img.at(x, y) = palette[idx];
            }
        }
    }
    return img;
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2) throw FormatError("file too short for a magic number: " + path);
    in.seekg(0);

    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
        return load_pgm(in, path);
    }
    if (magic[0] == 'B' && magic[1] == 'M') {
        return load_bmp(in);
    }
    throw FormatError(std::string("unsupported magic '") + magic[0] + magic[1] +
                      "' (PGM P2/P5 or BMP expected): " + path);
}

void save_image(const GrayImage& img, const std::string& path) {
    if (img.empty()) throw ArgumentError("save_image: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    std::transform(img.data().begin(), img.data().end(), raw.begin(), [](double v) {
        return static_cast<unsigned char>(clamp255(std::round(v)));
    });
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path);
}

double GaussianSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so log() stays finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

GrayImage add_gaussian_noise(const GrayImage& img, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw ArgumentError("add_gaussian_noise: sigma must be >= 0");
    GrayImage out = img;
    if (spec.sigma == 0.0) return out;
    GaussianSampler sampler(spec.seed);
    for (double& px : out.data()) {
        px += spec.sigma * sampler.next();
    }
    return out;
}

}  // namespace fabricvision
