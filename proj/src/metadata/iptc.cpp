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

#include <algorithm>
#include <cctype>

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

constexpr std::uint16_t kIptcResource = 0x0404;
constexpr std::uint16_t kIptcDigestResource = 0x0425;

bool is_date_dataset(int record, int dataset) {
    return record == 2 && (dataset == 30 || dataset == 37 || dataset == 47 || dataset == 55 ||
                           dataset == 62);
}

bool is_time_dataset(int record, int dataset) {
    return record == 2 && (dataset == 35 || dataset == 38 || dataset == 60 || dataset == 63);
}

bool all_digits(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// "20110217" -> "2011:02:17"
std::string format_iim_date(const std::string& raw) {
    if (raw.size() != 8 || !all_digits(raw)) return raw;
    return raw.substr(0, 4) + ":" + raw.substr(4, 2) + ":" + raw.substr(6, 2);
}

// "130427+0000" -> "13:04:27+00:00"
std::string format_iim_time(const std::string& raw) {
    if (raw.size() < 6 || !all_digits(std::string_view(raw).substr(0, 6))) return raw;
    std::string out = raw.substr(0, 2) + ":" + raw.substr(2, 2) + ":" + raw.substr(4, 2);
    if (raw.size() == 11 && (raw[6] == '+' || raw[6] == '-') &&
        all_digits(std::string_view(raw).substr(7, 4))) {
        out += raw[6] + raw.substr(7, 2) + ":" + raw.substr(9, 2);
    } else if (raw.size() > 6) {
        out += raw.substr(6);
    }
    return out;
}

void parse_iim(ByteView block, IptcData& out) {
    detail::ByteReader r(block);
    std::uint64_t pos = 0;
    while (pos < r.size()) {
        const auto tag_marker = r.u8(pos);
        if (!tag_marker) break;
        if (*tag_marker != 0x1C) {
            // Trailing padding is common; anything else is damage.
            if (*tag_marker != 0x00) {
                out.warnings.push_back({ErrorCode::CorruptStream,
                                        "IIM tag marker missing at offset " + std::to_string(pos)});
            }
            break;
        }
        const auto record = r.u8(pos + 1);
        const auto dataset = r.u8(pos + 2);
        const auto size_field = r.u16(pos + 3);
        if (!record || !dataset || !size_field) {
            out.warnings.push_back({ErrorCode::CorruptStream, "IIM dataset header truncated"});
            break;
        }
        std::uint64_t size = *size_field;
        std::uint64_t data_at = pos + 5;
        if (size & 0x8000) {
            // Extended dataset: the low bits give the width of the length field.
            const std::uint64_t width = size & 0x7FFF;
            if (width == 0 || width > 4 || !r.has(data_at, width)) {
                out.warnings.push_back({ErrorCode::CorruptStream, "bad extended IIM length"});
                break;
            }
            size = 0;
            for (std::uint64_t i = 0; i < width; ++i) size = (size << 8) | *r.u8(data_at + i);
            data_at += width;
        }
        const auto data = r.slice(data_at, size);
        if (!data) {
            out.warnings.push_back({ErrorCode::CorruptStream, "IIM dataset runs past end of block"});
            break;
        }
        IptcRecord rec;
        rec.record = *record;
        rec.dataset = *dataset;
        rec.name = iptc_dataset_name(rec.record, rec.dataset);
        rec.raw.assign(data->begin(), data->end());
        std::string text(data->begin(), data->end());
        while (!text.empty() && text.back() == '\0') text.pop_back();
        if (is_date_dataset(rec.record, rec.dataset)) {
            rec.value = format_iim_date(text);
        } else if (is_time_dataset(rec.record, rec.dataset)) {
            rec.value = format_iim_time(text);
        } else if (rec.record == 1 && rec.dataset == 90) {
            rec.value = text == "\x1b%G" ? "UTF8" : text;
        } else {
            rec.value = std::move(text);
        }
        out.records.push_back(std::move(rec));
        pos = data_at + size;
    }
}

}  // namespace

std::vector<std::string> IptcData::values(int record, int dataset) const {
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (r.record == record && r.dataset == dataset) out.push_back(r.value);
    }
    return out;
}

std::optional<std::string> IptcData::first(int record, int dataset) const {
    for (const auto& r : records) {
        if (r.record == record && r.dataset == dataset) return r.value;
    }
    return std::nullopt;
}

std::string iptc_dataset_name(int record, int dataset) {
    if (record == 1) {
        switch (dataset) {
            case 0: return "Envelope Record Version";
            case 90: return "Coded Character Set";
            default: break;
        }
    }
    if (record == 2) {
        switch (dataset) {
            case 0: return "Application Record Version";
            case 5: return "Object Name";
            case 10: return "Urgency";
            case 15: return "Category";
            case 20: return "Supplemental Categories";
            case 25: return "Keywords";
            case 30: return "Release Date";
            case 35: return "Release Time";
            case 40: return "Special Instructions";
            case 47: return "Reference Date";
            case 55: return "Date Created";
            case 60: return "Time Created";
            case 62: return "Digital Creation Date";
            case 63: return "Digital Creation Time";
            case 65: return "Originating Program";
            case 70: return "Program Version";
            case 80: return "By-line";
            case 85: return "By-line Title";
            case 90: return "City";
            case 92: return "Sub-location";
            case 95: return "Province-State";
            case 100: return "Country-Primary Location Code";
            case 101: return "Country-Primary Location Name";
            case 103: return "Original Transmission Reference";
            case 105: return "Headline";
            case 110: return "Credit";
            case 115: return "Source";
            case 116: return "Copyright Notice";
            case 120: return "Caption-Abstract";
            case 122: return "Writer-Editor";
            default: break;
        }
    }
    return "IPTC " + std::to_string(record) + ":" + std::to_string(dataset);
}

IptcData parse_iptc(ByteView app13_payload) {
    IptcData out;
    detail::ByteReader r(app13_payload);
    constexpr std::string_view header("Photoshop 3.0\0", 14);
    if (!r.starts_with(header)) {
        out.warnings.push_back({ErrorCode::NoIptcResource, "APP13 is not a Photoshop resource block"});
        return out;
    }
    bool found = false;
    std::uint64_t pos = header.size();
    while (r.has(pos, 12)) {
        if (*r.text(pos, 4) != "8BIM") {
            out.warnings.push_back({ErrorCode::CorruptStream,
                                    "bad image resource signature at offset " + std::to_string(pos)});
            break;
        }
        const std::uint16_t id = *r.u16(pos + 4);
        const auto name_len = r.u8(pos + 6);
        if (!name_len) break;
        // Pascal string (length byte + name) padded to an even size.
        std::uint64_t name_field = 1 + static_cast<std::uint64_t>(*name_len);
        if (name_field % 2) ++name_field;
        const auto size = r.u32(pos + 6 + name_field);
        if (!size) break;
        const std::uint64_t data_at = pos + 6 + name_field + 4;
        const auto data = r.slice(data_at, *size);
        if (!data) {
            out.warnings.push_back({ErrorCode::CorruptStream, "image resource runs past end of APP13"});
            break;
        }
        if (id == kIptcResource) {
            found = true;
            parse_iim(*data, out);
        } else if (id == kIptcDigestResource) {
            out.digest = Bytes(data->begin(), data->end());
        }
        std::uint64_t padded = *size;
        if (padded % 2) ++padded;
        pos = data_at + padded;
    }
    if (!found) {
        out.warnings.push_back({ErrorCode::NoIptcResource, "no IPTC-IIM resource (0x0404)"});
    }
    return out;
}

}  // namespace printproof::metadata
