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

#ifndef PRINTPROOF_METADATA_HPP
#define PRINTPROOF_METADATA_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "printproof/core.hpp"
#include "printproof/error.hpp"

namespace printproof::metadata {

/// Non-fatal parser finding. Parsers keep going and report these alongside
/// whatever they recovered.
struct Warning {
    ErrorCode code;
    std::string message;
};

// ---------------------------------------------------------------------------
// Container structure
// ---------------------------------------------------------------------------

enum class SegmentKind { SOI, APPn, DQT, SOF0, SOF2, DHT, SOS, COM, EOI, other };

[[nodiscard]] std::string segment_kind_name(SegmentKind kind, int app_index);

struct Segment {
    std::uint16_t marker = 0;  // full code, e.g. 0xFFE1
    std::size_t offset = 0;    // index of the marker's 0xFF byte
    std::size_t length = 0;    // payload bytes (size field minus 2); 0 for standalone markers
    SegmentKind kind = SegmentKind::other;
    int app_index = -1;  // n for APPn
    Bytes prefix;        // fill bytes or garbage between the previous segment and this marker
    Bytes payload;       // bytes after the size field
    Bytes entropy;       // entropy-coded data following an SOS header
};

struct SegmentTree {
    std::vector<Segment> segments;
    Bytes trailer;  // bytes after EOI, or the unparseable tail of a truncated stream
    bool truncated = false;
    std::vector<Warning> warnings;

    [[nodiscard]] std::vector<const Segment*> find(SegmentKind kind) const;
    [[nodiscard]] std::vector<const Segment*> find_app(int n) const;
};

/// Walks the marker stream. Throws Error(NotAJpeg) when the stream does not
/// start with SOI; a stream ending before EOI is returned with `truncated`
/// set and a TruncatedStream warning.
[[nodiscard]] SegmentTree parse_segments(ByteView bytes);

/// Inverse of parse_segments: reproduces the original bytes exactly.
[[nodiscard]] Bytes serialize_segments(const SegmentTree& tree);

struct ComponentSampling {
    int id = 0;
    int h = 1;
    int v = 1;
    int quant_table = 0;
};

struct EncodingInfo {
    std::uint16_t sof_marker = 0;
    std::string encoding_process;
    std::string subsampling;
    int bits = 8;
    int components = 0;
    int width = 0;
    int height = 0;
    std::vector<ComponentSampling> sampling;
};

/// Throws Error(NoFrameHeader) or Error(MultipleFrameHeaders).
[[nodiscard]] EncodingInfo detect_encoding(const SegmentTree& tree);

/// "YCbCr4:2:0 (2 2)" style string from SOF sampling factors; empty for a
/// single-component frame.
[[nodiscard]] std::string format_subsampling(const std::vector<ComponentSampling>& sampling);

// ---------------------------------------------------------------------------
// Quantization tables
// ---------------------------------------------------------------------------

struct QuantTable {
    int id = 0;
    int precision = 0;  // 0: 8-bit entries, 1: 16-bit entries
    std::array<std::uint16_t, 64> natural{};  // de-zigzagged
};

[[nodiscard]] std::vector<QuantTable> parse_quant_tables(const SegmentTree& tree);

/// IJG reference luminance/chrominance tables scaled for `quality` (1..100).
[[nodiscard]] std::array<std::uint16_t, 64> ijg_luminance_table(int quality,
                                                                bool force_baseline = true);
[[nodiscard]] std::array<std::uint16_t, 64> ijg_chrominance_table(int quality,
                                                                  bool force_baseline = true);

enum class QualityConfidence { exact, approximate };

struct QualityEstimate {
    int quality = 0;
    QualityConfidence confidence = QualityConfidence::approximate;
};

/// Matches the luminance table against the IJG family. Throws
/// Error(NoQuantTables).
[[nodiscard]] QualityEstimate estimate_quality(const SegmentTree& tree);
[[nodiscard]] QualityEstimate estimate_quality(const QuantTable& luminance);

// ---------------------------------------------------------------------------
// EXIF
// ---------------------------------------------------------------------------

enum class ExifIfd { IFD0, ExifIFD, GPS };

[[nodiscard]] std::string_view to_string(ExifIfd ifd) noexcept;

struct URational {
    std::uint32_t num = 0;
    std::uint32_t den = 0;
    friend bool operator==(const URational&, const URational&) = default;
};

struct SRational {
    std::int32_t num = 0;
    std::int32_t den = 0;
    friend bool operator==(const SRational&, const SRational&) = default;
};

/// Decoded TIFF value. Integer types widen to 64 bits; rationals keep their
/// numerator and denominator.
using ExifValue = std::variant<std::string, std::vector<std::uint64_t>, std::vector<std::int64_t>,
                               std::vector<URational>, std::vector<SRational>,
                               std::vector<double>, Bytes>;

struct ExifEntry {
    std::uint16_t tag = 0;
    ExifIfd ifd = ExifIfd::IFD0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    ExifValue value;
};

struct ExifData {
    bool big_endian = false;
    std::vector<ExifEntry> entries;
    std::vector<Warning> warnings;

    [[nodiscard]] const ExifEntry* find(std::uint16_t tag) const;
};

namespace exif_tag {
inline constexpr std::uint16_t XResolution = 0x011A;
inline constexpr std::uint16_t YResolution = 0x011B;
inline constexpr std::uint16_t ResolutionUnit = 0x0128;
inline constexpr std::uint16_t MakerNote = 0x927C;
inline constexpr std::uint16_t ExifOffset = 0x8769;
inline constexpr std::uint16_t GpsOffset = 0x8825;
inline constexpr std::uint16_t DateTimeOriginal = 0x9003;
}  // namespace exif_tag

/// Decodes IFD0, the Exif sub-IFD and the GPS IFD. Throws
/// Error(BadTiffHeader); out-of-range offsets stop the affected IFD with an
/// IfdOffsetOutOfBounds warning.
[[nodiscard]] ExifData parse_exif(ByteView app1_payload);

[[nodiscard]] std::string exif_tag_name(std::uint16_t tag, ExifIfd ifd);
/// Listing form: "166" for 166/1, NUL-trimmed strings, space-separated lists.
[[nodiscard]] std::string format_exif_value(const ExifEntry& entry);

// ---------------------------------------------------------------------------
// IPTC-IIM
// ---------------------------------------------------------------------------

struct IptcRecord {
    int record = 0;
    int dataset = 0;
    std::string name;
    std::string value;  // dates as "YYYY:MM:DD", times as "HH:MM:SS+hh:mm"
    Bytes raw;
};

struct IptcData {
    std::vector<IptcRecord> records;
    /// Raw bytes of Photoshop resource 0x0425, reported as-is.
    std::optional<Bytes> digest;
    std::vector<Warning> warnings;

    [[nodiscard]] std::vector<std::string> values(int record, int dataset) const;
    [[nodiscard]] std::optional<std::string> first(int record, int dataset) const;
};

[[nodiscard]] std::string iptc_dataset_name(int record, int dataset);

/// A payload without IPTC content yields an empty result with a
/// NoIptcResource warning.
[[nodiscard]] IptcData parse_iptc(ByteView app13_payload);

// ---------------------------------------------------------------------------
// ICC
// ---------------------------------------------------------------------------

struct Xyz {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class RenderingIntent { perceptual, relative_colorimetric, saturation, absolute_colorimetric, unknown };

[[nodiscard]] std::string_view to_string(RenderingIntent intent) noexcept;

struct IccSummary {
    std::string profile_cmm_type;  // raw 4-char signature
    std::string cmm_name;          // vendor name where known, else the signature
    std::string version;           // "2.1.0"
    std::string device_class;      // "Display Device Profile"
    std::string color_space;       // "RGB"
    std::string connection_space;  // "XYZ"
    std::string description;
    std::string copyright;
    std::string creation_datetime;  // "YYYY:MM:DD HH:MM:SS"
    std::string signature;          // "acsp"
    std::string platform;
    std::string creator;
    RenderingIntent rendering_intent = RenderingIntent::unknown;
    Xyz illuminant;
    Xyz white_point;  // 'wtpt' tag, falling back to the header illuminant
    std::uint32_t profile_size = 0;
};

/// Chunks are whole APP2 payloads, each starting "ICC_PROFILE\0" + index +
/// count. Throws Error(MissingChunk) or Error(BadProfileSignature).
[[nodiscard]] IccSummary parse_icc(const std::vector<ByteView>& app2_chunks);

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

struct JfifInfo {
    std::string version;  // "1.01"
    int units = 0;        // 0 none, 1 inches, 2 cm
    int x_density = 0;
    int y_density = 0;
};

struct SegmentEntry {
    std::string kind;
    std::uint16_t marker = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct MetadataSummary {
    std::uint64_t file_size = 0;
    ContentHash file_hash;
    std::string mime;
    std::string file_type;  // "JPEG" / "PNG"
    std::optional<JfifInfo> jfif;
    std::optional<EncodingInfo> frame;
    int width = 0;
    int height = 0;
    int bits_per_sample = 0;
    int color_components = 0;
    std::string image_size;  // "634x821"
    double megapixels = 0.0;
    std::optional<std::string> comment;
    ExifData exif;
    IptcData iptc;
    std::optional<IccSummary> icc;
    std::optional<QualityEstimate> quality;
    std::vector<SegmentEntry> segments;
    std::vector<Warning> warnings;
};

/// round(width * height / 1e6, 3)
[[nodiscard]] double megapixels(int width, int height) noexcept;

/// Composes every parser. Parser failures become warnings; throws only when
/// the stream is neither JPEG nor PNG (Error(NotAJpeg)).
[[nodiscard]] MetadataSummary summarize(ByteView bytes);

/// Colon-separated field listing ("Megapixels : 0.521").
[[nodiscard]] std::string format_listing(const MetadataSummary& summary);

/// {file, jfif, sof, exif, iptc, icc, dqt, comment, segments, warnings}
[[nodiscard]] nlohmann::json to_json(const MetadataSummary& summary);

}  // namespace printproof::metadata

#endif  // PRINTPROOF_METADATA_HPP
