// Copyright 2026 The printproof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "printproof/codec.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>

// jpeglib.h needs size_t and FILE declared first.
#include <jerror.h>
#include <jpeglib.h>
#include <png.h>

#include "printproof/error.hpp"

namespace printproof {

std::optional<SourceFormat> detect_format(ByteView bytes) noexcept {
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
        return SourceFormat::jpeg;
    }
    static constexpr std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) {
        return SourceFormat::png;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// JPEG via libjpeg(-turbo)
// ---------------------------------------------------------------------------

namespace {

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    bool premature_eof = false;
    char message[JMSG_LENGTH_MAX] = {};
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void jpeg_emit_message(j_common_ptr cinfo, int level) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    if (level < 0) {
        if (cinfo->err->msg_code == JWRN_JPEG_EOF) err->premature_eof = true;
        cinfo->err->num_warnings++;
    }
}

struct DecodedJpeg {
    int width = 0;
    int height = 0;
    int components = 0;
    bool inverted_cmyk = false;
    std::vector<std::uint8_t> samples;
};

// Returns false with err.message populated on failure. No C++ objects with
// destructors may be created between setjmp and the libjpeg calls.
bool decode_jpeg_raw(ByteView bytes, DecodedJpeg& out, JpegErrorManager& err) {
    jpeg_decompress_struct cinfo{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.emit_message = jpeg_emit_message;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.dct_method = JDCT_ISLOW;
    if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
        cinfo.out_color_space = JCS_CMYK;
        out.inverted_cmyk = cinfo.saw_Adobe_marker;
    } else {
        cinfo.out_color_space = JCS_RGB;
    }
    jpeg_start_decompress(&cinfo);
    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.components = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(out.width) * out.components;
    out.samples.resize(stride * static_cast<std::size_t>(out.height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.samples.data() + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return !err.premature_eof;
}

RasterImage decode_jpeg(ByteView bytes) {
    DecodedJpeg raw;
    JpegErrorManager err;
    if (!decode_jpeg_raw(bytes, raw, err)) {
        std::string msg = err.premature_eof ? "premature end of JPEG stream" : err.message;
        throw Error(ErrorCode::CorruptStream, "JPEG decode failed: " + msg);
    }
    std::vector<Rgb> px(static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height));
    if (raw.components == 3) {
        std::memcpy(px.data(), raw.samples.data(), px.size() * 3);
    } else if (raw.components == 4) {
        for (std::size_t i = 0; i < px.size(); ++i) {
            int c = raw.samples[4 * i], m = raw.samples[4 * i + 1];
            int y = raw.samples[4 * i + 2], k = raw.samples[4 * i + 3];
            if (!raw.inverted_cmyk) {
                c = 255 - c, m = 255 - m, y = 255 - y, k = 255 - k;
            }
            px[i] = Rgb{static_cast<std::uint8_t>((c * k + 127) / 255),
                        static_cast<std::uint8_t>((m * k + 127) / 255),
                        static_cast<std::uint8_t>((y * k + 127) / 255)};
        }
    } else {
        throw Error(ErrorCode::UnsupportedFormat, "unsupported JPEG component layout");
    }
    return RasterImage(raw.width, raw.height, std::move(px), compute_hash(bytes),
                       SourceFormat::jpeg);
}

struct EncodeState {
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
};

bool encode_jpeg_raw(const RasterImage& img, const JpegEncodeOptions& opts, EncodeState& st,
                     JpegErrorManager& err) {
    jpeg_compress_struct cinfo{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.emit_message = jpeg_emit_message;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        return false;
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &st.buffer, &st.size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, opts.quality, TRUE);
    cinfo.dct_method = JDCT_ISLOW;
    cinfo.optimize_coding = FALSE;
    cinfo.write_JFIF_header = opts.write_jfif ? TRUE : FALSE;
    int h = 2, v = 2;
    if (opts.subsampling == ChromaSubsampling::s444) h = 1, v = 1;
    if (opts.subsampling == ChromaSubsampling::s422) h = 2, v = 1;
    cinfo.comp_info[0].h_samp_factor = h;
    cinfo.comp_info[0].v_samp_factor = v;
    for (int c = 1; c < 3; ++c) {
        cinfo.comp_info[c].h_samp_factor = 1;
        cinfo.comp_info[c].v_samp_factor = 1;
    }
    if (opts.progressive) jpeg_simple_progression(&cinfo);
    jpeg_start_compress(&cinfo, TRUE);
    for (const JpegMarker& m : opts.markers) {
        jpeg_write_marker(&cinfo, m.code, m.payload.data(),
                          static_cast<unsigned int>(m.payload.size()));
    }
    const auto* base = reinterpret_cast<const std::uint8_t*>(img.pixels().data());
    const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
    while (cinfo.next_scanline < cinfo.image_height) {
        // libjpeg never writes through the row pointer during compression.
        auto* row = const_cast<JSAMPLE*>(base + stride * cinfo.next_scanline);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    return true;
}

// ---------------------------------------------------------------------------
// PNG via libpng
// ---------------------------------------------------------------------------

struct PngReadCursor {
    ByteView bytes;
    std::size_t pos = 0;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t n) {
    auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + n > cur->bytes.size()) {
        png_error(png, "read past end of PNG stream");
    }
    std::memcpy(out, cur->bytes.data() + cur->pos, n);
    cur->pos += n;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}

void png_flush_noop(png_structp) {}

void png_error_to_jump(png_structp png, png_const_charp msg) {
    auto* slot = static_cast<char*>(png_get_error_ptr(png));
    if (slot) std::snprintf(slot, 256, "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

struct DecodedPng {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
    std::vector<std::pair<std::string, std::string>> text;
};

bool decode_png_raw(ByteView bytes, DecodedPng& out, char* message, bool want_pixels) {
    PngReadCursor cursor{bytes, 0};
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, message, png_error_to_jump,
                               png_warning_ignore);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &cursor, png_read_from_memory);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w == 0 || h == 0 || w > 65535 || h > 65535) {
        png_error(png, "unsupported PNG dimensions");
    }
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    if (want_pixels) {
        png_set_expand(png);
        png_set_strip_16(png);
        png_set_strip_alpha(png);
        png_set_gray_to_rgb(png);
        png_set_interlace_handling(png);
        png_read_update_info(png, info);
        if (png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * 3) {
            png_error(png, "unexpected PNG row layout");
        }
        out.rgb.resize(static_cast<std::size_t>(w) * h * 3);
        rows.resize(h);
        for (png_uint_32 y = 0; y < h; ++y) rows[y] = out.rgb.data() + static_cast<std::size_t>(y) * w * 3;
        png_read_image(png, rows.data());
    } else {
        png_read_update_info(png, info);
        std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
        const int passes = png_set_interlace_handling(png);
        for (int p = 0; p < passes; ++p) {
            for (png_uint_32 y = 0; y < h; ++y) png_read_row(png, row.data(), nullptr);
        }
    }
    png_read_end(png, info);
    png_textp text = nullptr;
    int num_text = 0;
    if (png_get_text(png, info, &text, &num_text) > 0) {
        for (int i = 0; i < num_text; ++i) {
            out.text.emplace_back(text[i].key, std::string(text[i].text, text[i].text_length));
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

RasterImage decode_png(ByteView bytes) {
    DecodedPng raw;
    char message[256] = "unknown PNG error";
    if (!decode_png_raw(bytes, raw, message, true)) {
        throw Error(ErrorCode::CorruptStream, std::string("PNG decode failed: ") + message);
    }
    std::vector<Rgb> px(static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height));
    std::memcpy(px.data(), raw.rgb.data(), raw.rgb.size());
    return RasterImage(raw.width, raw.height, std::move(px), compute_hash(bytes),
                       SourceFormat::png);
}

bool encode_png_raw(int width, int height, int channels, const std::uint8_t* samples,
                    const std::map<std::string, std::string>& text, Bytes& out, char* message) {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, message, png_error_to_jump,
                                png_warning_ignore);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    std::vector<png_text> entries;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    entries.reserve(text.size());
    for (const auto& [key, value] : text) {
        png_text t{};
        t.compression = PNG_TEXT_COMPRESSION_NONE;
        t.key = const_cast<char*>(key.c_str());
        t.text = const_cast<char*>(value.c_str());
        t.text_length = value.size();
        entries.push_back(t);
    }
    if (!entries.empty()) png_set_text(png, info, entries.data(), static_cast<int>(entries.size()));
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y) {
        png_write_row(png, samples + stride * static_cast<std::size_t>(y));
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

RasterImage load_image(ByteView bytes) {
    const auto format = detect_format(bytes);
    if (!format) {
        // A bare SOI (FF D8) without a following marker is a truncated JPEG,
        // not an unknown format.
        if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
            throw Error(ErrorCode::CorruptStream, "JPEG stream ends after SOI");
        }
        throw Error(ErrorCode::UnsupportedFormat, "input is neither JPEG nor PNG");
    }
    return *format == SourceFormat::jpeg ? decode_jpeg(bytes) : decode_png(bytes);
}

Bytes encode_jpeg(const RasterImage& img, const JpegEncodeOptions& opts) {
    if (opts.quality < 1 || opts.quality > 100) {
        throw Error(ErrorCode::EncodeFailure, "JPEG quality must be in 1..100");
    }
    for (const auto& m : opts.markers) {
        if (m.payload.size() > 65533) {
            throw Error(ErrorCode::EncodeFailure, "JPEG marker payload exceeds 65533 bytes");
        }
    }
    EncodeState st;
    JpegErrorManager err;
    const bool ok = encode_jpeg_raw(img, opts, st, err);
    Bytes out;
    if (ok && st.buffer) out.assign(st.buffer, st.buffer + st.size);
    std::free(st.buffer);
    if (!ok) {
        throw Error(ErrorCode::EncodeFailure, std::string("JPEG encode failed: ") + err.message);
    }
    return out;
}

Bytes encode_png(const RasterImage& img, const std::map<std::string, std::string>& text) {
    Bytes out;
    char message[256] = "unknown PNG error";
    if (!encode_png_raw(img.width(), img.height(), 3,
                        reinterpret_cast<const std::uint8_t*>(img.pixels().data()), text, out,
                        message)) {
        throw Error(ErrorCode::EncodeFailure, std::string("PNG encode failed: ") + message);
    }
    return out;
}

Bytes encode_map_png(const AnalysisMap& map) {
    std::vector<std::uint8_t> samples(map.values.size());
    std::transform(map.values.begin(), map.values.end(), samples.begin(), [](float v) {
        const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
        return static_cast<std::uint8_t>(std::lround(c * 255.0));
    });
    const std::map<std::string, std::string> text{
        {"printproof:kind", std::string(to_string(map.kind))},
        {"printproof:params", map.params_json},
        {"printproof:params_digest", map.params_digest.hex()},
    };
    Bytes out;
    char message[256] = "unknown PNG error";
    if (!encode_png_raw(map.width, map.height, map.channels, samples.data(), text, out, message)) {
        throw Error(ErrorCode::EncodeFailure, std::string("PNG encode failed: ") + message);
    }
    return out;
}

std::map<std::string, std::string> read_png_text(ByteView png) {
    DecodedPng raw;
    char message[256] = "unknown PNG error";
    if (!decode_png_raw(png, raw, message, false)) {
        throw Error(ErrorCode::CorruptStream, std::string("PNG decode failed: ") + message);
    }
    return {raw.text.begin(), raw.text.end()};
}

}  // namespace printproof
