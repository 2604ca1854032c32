// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include "t2v/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <vector>

#include <openssl/evp.h>
#include <png.h>

#include "t2v/error.hpp"

namespace t2v {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f != nullptr) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string hex(const unsigned char* data, unsigned int size) {
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < size; ++i) os << std::setw(2) << static_cast<int>(data[i]);
    return os.str();
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image) {
    if (image.empty()) {
        throw ValidationError("write_png: empty image");
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) {
        throw Error("write_png: cannot open " + tmp.string());
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw Error("write_png: libpng initialization failed");
    }

    std::vector<png_byte> rows(image.size());
    auto v = image.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        rows[i] = static_cast<png_byte>(std::lround(std::clamp(v[i], 0.0, 1.0) * 255.0));
    }
    std::vector<png_bytep> pointers(static_cast<std::size_t>(image.height()));
    const std::size_t stride = static_cast<std::size_t>(image.width()) * Image::kChannels;
    for (std::size_t y = 0; y < pointers.size(); ++y) pointers[y] = rows.data() + y * stride;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("write_png: libpng error writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_rows(png, info, pointers.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(file.release()) != 0) {
        throw Error("write_png: failed to flush " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Image read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw Error("read_png: cannot open " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("read_png: libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("read_png: libpng error reading " + path.string());
    }
    png_init_io(png, file.get());
    png_read_png(png, info, PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND, nullptr);
    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);
    png_bytepp rows = png_get_rows(png, info);
    Image image(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < Image::kChannels; ++c) {
                const int src = channels >= 3 ? c : 0;
                image.at(y, x, c) = rows[y][x * channels + src] / 255.0;
            }
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int size = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest failed");
    }
    return hex(digest, size);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw Error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace t2v
