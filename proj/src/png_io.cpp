#include "trw/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace trw {

namespace {

void put_u32be(std::vector<u8>& v, u64 x) {
    v.push_back(static_cast<u8>((x >> 24) & 0xff));
    v.push_back(static_cast<u8>((x >> 16) & 0xff));
    v.push_back(static_cast<u8>((x >> 8) & 0xff));
    v.push_back(static_cast<u8>(x & 0xff));
}

u64 get_u32be(const u8* p) {
    return (u64(p[0]) << 24) | (u64(p[1]) << 16) | (u64(p[2]) << 8) | u64(p[3]);
}

void write_chunk(std::vector<u8>& out, const char type[4], const std::vector<u8>& data) {
    put_u32be(out, data.size());
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(4 + data.size()));
    put_u32be(out, crc);
}

}  // namespace

void write_png_rgb8(const std::string& path, int width, int height, const std::vector<u8>& rgb) {
    check_arg(width > 0 && height > 0, "write_png: bad dimensions");
    check_arg(rgb.size() == static_cast<std::size_t>(3) * width * height,
              "write_png: pixel buffer size mismatch");

    // raw scanlines, filter byte 0 (None) per row
    const std::size_t stride = static_cast<std::size_t>(width) * 3;
    std::vector<u8> raw((stride + 1) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        u8* row = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        row[0] = 0;
        std::memcpy(row + 1, rgb.data() + static_cast<std::size_t>(y) * stride, stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<u8> compressed(bound);
    int rc = compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6);
    check_parse(rc == Z_OK, "write_png: zlib compression failed");
    compressed.resize(bound);

    std::vector<u8> out;
    const u8 sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.insert(out.end(), sig, sig + 8);

    std::vector<u8> ihdr;
    put_u32be(ihdr, static_cast<u64>(width));
    put_u32be(ihdr, static_cast<u64>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type RGB
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    write_chunk(out, "IHDR", ihdr);
    write_chunk(out, "IDAT", compressed);
    write_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary);
    check_parse(f.good(), "write_png: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    check_parse(f.good(), "write_png: write failed for " + path);
}

void read_png_rgb8(const std::string& path, int& width, int& height, std::vector<u8>& rgb) {
    std::ifstream f(path, std::ios::binary);
    check_parse(f.good(), "read_png: cannot open " + path);
    std::vector<u8> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    check_parse(buf.size() > 8, path + ": truncated PNG");
    const u8 sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    check_parse(std::memcmp(buf.data(), sig, 8) == 0, path + ": not a PNG file");

    std::size_t pos = 8;
    bool have_ihdr = false;
    std::vector<u8> idat;
    width = height = 0;
    int bit_depth = 0, color_type = -1, interlace = -1;

    while (pos + 8 <= buf.size()) {
        const u64 len = get_u32be(buf.data() + pos);
        check_parse(pos + 12 + len <= buf.size(), path + ": truncated chunk");
        const char* type = reinterpret_cast<const char*>(buf.data() + pos + 4);
        const u8* data = buf.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            check_parse(len == 13, path + ": bad IHDR");
            width = static_cast<int>(get_u32be(data));
            height = static_cast<int>(get_u32be(data + 4));
            bit_depth = data[8];
            color_type = data[9];
            interlace = data[12];
            have_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    check_parse(have_ihdr && width > 0 && height > 0, path + ": missing IHDR");
    check_parse(bit_depth == 8 && color_type == 2,
                path + ": unsupported PNG (need 8-bit RGB, color type 2)");
    check_parse(interlace == 0, path + ": interlaced PNG not supported");

    const std::size_t stride = static_cast<std::size_t>(width) * 3;
    std::vector<u8> raw((stride + 1) * static_cast<std::size_t>(height));
    uLongf raw_len = static_cast<uLongf>(raw.size());
    int rc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
    check_parse(rc == Z_OK && raw_len == raw.size(), path + ": zlib inflate failed");

    rgb.assign(stride * static_cast<std::size_t>(height), 0);
    const int bpp = 3;
    for (int y = 0; y < height; ++y) {
        const u8* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        const u8 filter = src[0];
        const u8* cur_in = src + 1;
        u8* cur = rgb.data() + static_cast<std::size_t>(y) * stride;
        const u8* up = y > 0 ? rgb.data() + static_cast<std::size_t>(y - 1) * stride : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = up ? up[i] : 0;
            const int c = (up && i >= static_cast<std::size_t>(bpp)) ? up[i - bpp] : 0;
            int v = cur_in[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: {
                    const int p = a + b - c;
                    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
                    v += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    break;
                }
                default: check_parse(false, path + ": unknown PNG filter type");
            }
            cur[i] = static_cast<u8>(v & 0xff);
        }
    }
}

}  // namespace trw
