#include "sarqa/raster.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "sarqa/numeric.hpp"

namespace sarqa {

Raster::Raster(int w, int h, double fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ValidationError("raster dimensions must be positive");
    data.assign(static_cast<size_t>(w) * h, fill);
}

SummaryStats stats_of(const double* values, size_t count) {
    if (count < 2) throw ValidationError("stats: need at least 2 samples");
    double sum = 0.0;
    for (size_t i = 0; i < count; ++i) sum += values[i];
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double d = values[i] - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(count - 1);
    SummaryStats s;
    s.mean = mean;
    s.std = std::sqrt(var);
    s.enl = var == 0.0 ? std::numeric_limits<double>::infinity()
                       : mean * mean / var;
    return s;
}

namespace {

void put_u64le(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t bits_of(double d) {
    uint64_t u;
    std::memcpy(&u, &d, sizeof(u));
    return u;
}

double double_of(uint64_t u) {
    double d;
    std::memcpy(&d, &u, sizeof(d));
    return d;
}

} // namespace

Raster load_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open raster file: " + path.string());

    std::string header;
    if (!std::getline(in, header))
        throw ParseError("RAS1 malformed header: missing header line in " + path.string());

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("RAS1 malformed header: ") + e.what());
    }
    if (!j.is_object() || j.value("magic", "") != "RAS1")
        throw ParseError("RAS1 malformed header: bad magic");
    if (j.value("dtype", "") != "f64le")
        throw ParseError("RAS1 malformed header: unsupported dtype");
    if (!j.contains("width") || !j.contains("height") ||
        !j["width"].is_number_integer() || !j["height"].is_number_integer())
        throw ParseError("RAS1 malformed header: width/height missing or not integers");
    const long long w = j["width"].get<long long>();
    const long long h = j["height"].get<long long>();
    if (w <= 0 || h <= 0 || w > 1 << 20 || h > 1 << 20)
        throw ParseError("RAS1 malformed header: dimensions out of range");

    Raster r(static_cast<int>(w), static_cast<int>(h));
    const size_t expected = r.size() * sizeof(double);
    std::vector<char> payload(expected);
    in.read(payload.data(), static_cast<std::streamsize>(expected));
    if (static_cast<size_t>(in.gcount()) != expected)
        throw ParseError("RAS1 length mismatch: payload shorter than width*height");
    char trailer;
    if (in.read(&trailer, 1); in.gcount() != 0)
        throw ParseError("RAS1 length mismatch: trailing bytes after payload");

    for (size_t i = 0; i < r.size(); ++i) {
        uint64_t u = 0;
        for (int b = 7; b >= 0; --b)
            u = (u << 8) | static_cast<uint8_t>(payload[i * 8 + b]);
        const double v = double_of(u);
        if (!std::isfinite(v))
            throw ParseError("RAS1 non-finite payload value at index " + std::to_string(i));
        r.data[i] = v;
    }
    return r;
}

void save_raster(const Raster& r, const std::filesystem::path& path) {
    if (r.width <= 0 || r.height <= 0 || r.data.size() != r.size())
        throw ValidationError("save_raster: inconsistent raster");
    for (double v : r.data)
        if (!std::isfinite(v))
            throw ValidationError("save_raster: raster holds non-finite values");

    std::string out;
    out.reserve(64 + r.size() * 8);
    char header[96];
    std::snprintf(header, sizeof(header),
                  "{\"magic\":\"RAS1\",\"width\":%d,\"height\":%d,\"dtype\":\"f64le\"}\n",
                  r.width, r.height);
    out += header;
    for (double v : r.data) put_u64le(out, bits_of(v));

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw IoError("cannot open for writing: " + path.string());
    of.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!of) throw IoError("short write: " + path.string());
}

// ---------------------------------------------------------------------------
// Minimal PNG encoder: 8-bit grayscale, filter 0 rows, stored deflate blocks.
// View-only output, so no compression is fine.

namespace {

uint32_t crc32_update(uint32_t crc, const uint8_t* buf, size_t len) {
    static std::array<uint32_t, 256> table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t n = 0; n < 256; ++n) {
            uint32_t c = n;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    for (size_t i = 0; i < len; ++i)
        crc = table[(crc ^ buf[i]) & 0xff] ^ (crc >> 8);
    return crc;
}

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& body) {
    put_u32be(out, static_cast<uint32_t>(body.size()));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), body.begin(), body.end());
    uint32_t crc = crc32_update(0xFFFFFFFFu, out.data() + start, out.size() - start);
    put_u32be(out, crc ^ 0xFFFFFFFFu);
}

std::vector<uint8_t> zlib_store(const std::vector<uint8_t>& raw) {
    std::vector<uint8_t> z;
    z.push_back(0x78); // CM=8, CINFO=7
    z.push_back(0x01); // FCHECK for no-dict, fastest
    size_t pos = 0;
    while (pos < raw.size() || raw.empty()) {
        const size_t n = std::min<size_t>(raw.size() - pos, 65535);
        const bool last = pos + n == raw.size();
        z.push_back(last ? 1 : 0);
        z.push_back(static_cast<uint8_t>(n & 0xff));
        z.push_back(static_cast<uint8_t>(n >> 8));
        z.push_back(static_cast<uint8_t>(~n & 0xff));
        z.push_back(static_cast<uint8_t>((~n >> 8) & 0xff));
        z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + n);
        pos += n;
        if (raw.empty()) break;
    }
    uint32_t a = 1, b = 0;
    for (uint8_t byte : raw) {
        a = (a + byte) % 65521;
        b = (b + a) % 65521;
    }
    put_u32be(z, (b << 16) | a);
    return z;
}

} // namespace

void export_png8(const Raster& r, const std::filesystem::path& path,
                 double clip_low_pct, double clip_high_pct) {
    if (r.size() == 0) throw ValidationError("export_png8: empty raster");
    if (clip_low_pct > clip_high_pct)
        throw ValidationError("export_png8: clip percentiles out of order");
    const double lo = percentile_nearest_rank(r.data, clip_low_pct);
    const double hi = percentile_nearest_rank(r.data, clip_high_pct);

    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(r.height) * (r.width + 1));
    for (int y = 0; y < r.height; ++y) {
        raw.push_back(0); // filter type: none
        for (int x = 0; x < r.width; ++x) {
            uint8_t g = 128;
            if (hi > lo) {
                double t = (r.at(y, x) - lo) / (hi - lo);
                t = std::clamp(t, 0.0, 1.0);
                g = static_cast<uint8_t>(std::lround(t * 255.0));
            }
            raw.push_back(g);
        }
    }

    std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    std::vector<uint8_t> ihdr;
    put_u32be(ihdr, static_cast<uint32_t>(r.width));
    put_u32be(ihdr, static_cast<uint32_t>(r.height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter
    ihdr.push_back(0); // no interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", zlib_store(raw));
    put_chunk(png, "IEND", {});

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw IoError("cannot open for writing: " + path.string());
    of.write(reinterpret_cast<const char*>(png.data()),
             static_cast<std::streamsize>(png.size()));
    if (!of) throw IoError("short write: " + path.string());
}

Raster square_amplitude(const Raster& r) {
    Raster out = r;
    for (double& v : out.data) {
        if (v < 0.0)
            throw ValidationError("square_amplitude: negative amplitude value");
        v = v * v;
    }
    return out;
}

SummaryStats roi_stats(const Raster& r, const Roi& roi) {
    if (!roi.valid_in(r)) throw ValidationError("roi_stats: roi outside raster");
    if (roi.area() < 2) throw ValidationError("roi_stats: roi area must be >= 2");
    std::vector<double> buf;
    buf.reserve(static_cast<size_t>(roi.area()));
    for (int y = roi.y0; y < roi.y0 + roi.h; ++y)
        for (int x = roi.x0; x < roi.x0 + roi.w; ++x)
            buf.push_back(r.at(y, x));
    return stats_of(buf.data(), buf.size());
}

} // namespace sarqa
