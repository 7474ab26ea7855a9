#ifndef SARQA_TESTS_HELPERS_HPP
#define SARQA_TESTS_HELPERS_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "sarqa/raster.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Fresh scratch directory, removed when the object dies.
struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("sarqa_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

inline std::vector<uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool same_bytes(const fs::path& a, const fs::path& b) {
    return read_bytes(a) == read_bytes(b);
}

/// Runs the CLI binary with the given argument string; returns the exit code.
inline int run_cli(const std::string& args) {
    const std::string cmd = std::string(SARQA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

/// Pooled mean/std/enl over several rectangles of one raster.
inline sarqa::SummaryStats pooled_stats(const sarqa::Raster& r,
                                        const std::vector<sarqa::Roi>& rois) {
    std::vector<double> buf;
    for (const sarqa::Roi& roi : rois)
        for (int y = roi.y0; y < roi.y0 + roi.h; ++y)
            for (int x = roi.x0; x < roi.x0 + roi.w; ++x)
                buf.push_back(r.at(y, x));
    return sarqa::stats_of(buf.data(), buf.size());
}

/// Decodes the PNGs this project writes (8-bit gray, filter-0 rows, stored
/// deflate blocks). Enough of a reader to verify the writer.
struct MiniPng {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint8_t> pixels; // row-major gray
};

inline uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) |
           uint32_t(p[3]);
}

inline MiniPng parse_png(const fs::path& p) {
    const std::vector<uint8_t> buf = read_bytes(p);
    MiniPng png;
    if (buf.size() < 8) throw std::runtime_error("png too short");
    size_t pos = 8;
    std::vector<uint8_t> idat;
    while (pos + 8 <= buf.size()) {
        const uint32_t len = be32(&buf[pos]);
        const std::string type(buf.begin() + pos + 4, buf.begin() + pos + 8);
        const uint8_t* body = &buf[pos + 8];
        if (type == "IHDR") {
            png.width = be32(body);
            png.height = be32(&body[4]);
        } else if (type == "IDAT") {
            idat.insert(idat.end(), body, body + len);
        }
        pos += 12 + len;
    }
    // stored-deflate zlib stream: 2-byte header, then stored blocks
    size_t z = 2;
    std::vector<uint8_t> raw;
    while (z < idat.size()) {
        const uint8_t final = idat[z] & 1;
        const uint16_t n = idat[z + 1] | (idat[z + 2] << 8);
        raw.insert(raw.end(), idat.begin() + z + 5, idat.begin() + z + 5 + n);
        z += 5 + n;
        if (final) break;
    }
    png.pixels.reserve(size_t(png.width) * png.height);
    for (uint32_t y = 0; y < png.height; ++y) {
        const size_t row = size_t(y) * (png.width + 1);
        for (uint32_t x = 0; x < png.width; ++x)
            png.pixels.push_back(raw[row + 1 + x]);
    }
    return png;
}

} // namespace testutil

#endif
