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

#include "printproof/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "printproof/codec.hpp"
#include "printproof/filters.hpp"

namespace printproof::report {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "printproof-report/1";
constexpr const char* kReportFile = "report.json";
constexpr const char* kAuditFile = "audit.jsonl";
constexpr const char* kAnnotationsFile = "annotations.json";
constexpr const char* kHtmlFile = "report.html";

const ContentHash kEmptyParams = compute_hash(std::string_view("{}"));

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string to_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

std::string base64(ByteView bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string map_path(const AnalysisMap& map) {
    return "maps/" + std::string(to_string(map.kind)) + "-" + map.params_digest.hex().substr(0, 16) +
           ".png";
}

bool is_hex_hash(const json& j) {
    if (!j.is_string()) return false;
    const auto& s = j.get_ref<const std::string&>();
    return s.size() == 64 && std::ranges::all_of(s, [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

std::optional<Bytes> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_atomic(const std::filesystem::path& path, const Bytes& bytes) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::string> standard_caveats(const RasterImage& image,
                                          const std::vector<AnalysisInput>& analyses,
                                          const std::optional<MetrologyInput>& metrology) {
    std::vector<std::string> out;
    bool recompression_based = false;
    for (const auto& a : analyses) {
        if (a.map.kind == MapKind::ela || a.map.kind == MapKind::noise) recompression_based = true;
    }
    if (recompression_based && image.source_format() != SourceFormat::jpeg) {
        out.push_back("recompression baseline absent: ELA/noise ran on " +
                      std::string(to_string(image.source_format())) +
                      " input with no JPEG history of its own");
    }
    if (recompression_based) {
        out.push_back(
            "ELA and noise maps lose their meaning when the image is a rephotographed or "
            "rescanned print; read them only alongside the other evidence");
    }
    if (metrology && metrology->result.contains("heights") &&
        !metrology->result["heights"].empty()) {
        out.push_back(
            "height intervals come from printproof's own +-2 px endpoint perturbation policy, "
            "not from a calibrated error model");
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

json canonicalize(const json& j) {
    switch (j.type()) {
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) return nullptr;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            double r = std::strtod(buf, nullptr);
            if (r == 0.0) r = 0.0;  // drop negative zero
            return r;
        }
        case json::value_t::object: {
            json out = json::object();
            for (const auto& [k, v] : j.items()) out[k] = canonicalize(v);
            return out;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto& v : j) out.push_back(canonicalize(v));
            return out;
        }
        default: return j;
    }
}

std::string canonical_dump(const json& j) {
    return canonicalize(j).dump(-1, ' ', false, json::error_handler_t::replace);
}

ContentHash canonical_hash(const json& j) { return compute_hash(canonical_dump(j)); }

// ---------------------------------------------------------------------------
// Audit trail
// ---------------------------------------------------------------------------

json AuditEntry::to_json() const {
    return {{"timestamp", timestamp},         {"operation", operation},
            {"params_digest", params_digest.hex()}, {"input_hash", input_hash.hex()},
            {"output_hash", output_hash.hex()},     {"prev", prev.hex()},
            {"entry_hash", entry_hash.hex()}};
}

ContentHash AuditEntry::compute_entry_hash() const {
    json j = to_json();
    j.erase("entry_hash");
    return canonical_hash(j);
}

AuditEntry audit_entry_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::VerifyFailed, "audit entry is not an object");
    for (const char* key : {"params_digest", "input_hash", "output_hash", "prev", "entry_hash"}) {
        if (!j.contains(key) || !is_hex_hash(j[key])) {
            throw Error(ErrorCode::VerifyFailed, std::string("audit entry field ") + key +
                                                     " is not a hash");
        }
    }
    for (const char* key : {"timestamp", "operation"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw Error(ErrorCode::VerifyFailed,
                        std::string("audit entry field ") + key + " is not a string");
        }
    }
    if (j.size() != 7) throw Error(ErrorCode::VerifyFailed, "audit entry has unexpected fields");
    AuditEntry e;
    e.timestamp = j["timestamp"].get<std::string>();
    e.operation = j["operation"].get<std::string>();
    e.params_digest = ContentHash::from_hex(j["params_digest"].get<std::string>());
    e.input_hash = ContentHash::from_hex(j["input_hash"].get<std::string>());
    e.output_hash = ContentHash::from_hex(j["output_hash"].get<std::string>());
    e.prev = ContentHash::from_hex(j["prev"].get<std::string>());
    e.entry_hash = ContentHash::from_hex(j["entry_hash"].get<std::string>());
    return e;
}

const AuditEntry& AuditLog::append(std::string operation, const ContentHash& params_digest,
                                   const ContentHash& input_hash,
                                   const ContentHash& output_hash) {
    AuditEntry e;
    e.timestamp = timestamp_;
    e.operation = std::move(operation);
    e.params_digest = params_digest;
    e.input_hash = input_hash;
    e.output_hash = output_hash;
    if (!entries_.empty()) e.prev = entries_.back().entry_hash;
    e.entry_hash = e.compute_entry_hash();
    entries_.push_back(std::move(e));
    return entries_.back();
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

SummaryStats summary_stats(const AnalysisMap& map) {
    SummaryStats s;
    if (map.values.empty()) return s;
    std::vector<double> v(map.values.begin(), map.values.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.max = *std::ranges::max_element(v);
    s.p95 = nearest_rank_percentile(std::move(v), 95.0);
    return s;
}

ForensicReport build_report(const RasterImage& image, const metadata::MetadataSummary& summary,
                            const std::vector<AnalysisInput>& analyses,
                            const std::optional<MetrologyInput>& metrology,
                            const std::vector<std::string>& caveats,
                            const ReportOptions& options) {
    const ContentHash& image_hash = image.source_hash();
    if (summary.file_hash != image_hash) {
        throw Error(ErrorCode::HashMismatch, "metadata summary describes image " +
                                                 summary.file_hash.hex() + ", not " +
                                                 image_hash.hex());
    }
    for (const auto& a : analyses) {
        if (a.image_hash != image_hash) {
            throw Error(ErrorCode::HashMismatch,
                        std::string(to_string(a.map.kind)) + " analysis references image " +
                            a.image_hash.hex() + ", not " + image_hash.hex());
        }
    }

    ForensicReport report;
    AuditLog log(options.fixed_time.value_or(utc_now()));

    const auto pixels = image.pixels();
    const ContentHash pixel_hash =
        compute_hash(ByteView(reinterpret_cast<const std::uint8_t*>(pixels.data()),
                              pixels.size() * sizeof(Rgb)));
    log.append("load_image", kEmptyParams, image_hash, pixel_hash);

    const json metadata_json = metadata::to_json(summary);
    log.append("summarize_metadata", kEmptyParams, image_hash, canonical_hash(metadata_json));

    json doc;
    doc["format"] = kFormat;
    doc["image"] = {{"hash", image_hash.hex()},
                    {"pixel_hash", pixel_hash.hex()},
                    {"source_format", to_string(image.source_format())},
                    {"width", image.width()},
                    {"height", image.height()},
                    {"metadata", metadata_json}};

    json analyses_json = json::array();
    std::set<std::string> seen_paths;
    for (const auto& a : analyses) {
        const std::string path = map_path(a.map);
        if (!seen_paths.insert(path).second) continue;
        Bytes png = encode_map_png(a.map);
        const ContentHash png_hash = compute_hash(png);
        log.append("analysis." + std::string(to_string(a.map.kind)), a.map.params_digest,
                   image_hash, png_hash);
        const SummaryStats st = summary_stats(a.map);
        analyses_json.push_back({{"kind", to_string(a.map.kind)},
                                 {"params", json::parse(a.map.params_json)},
                                 {"params_digest", a.map.params_digest.hex()},
                                 {"map_reference", path},
                                 {"map_hash", png_hash.hex()},
                                 {"summary_stats",
                                  {{"mean", st.mean}, {"p95", st.p95}, {"max", st.max}}}});
        report.files[path] = std::move(png);
    }
    doc["analyses"] = analyses_json;

    doc["annotations"] = nullptr;
    doc["metrology"] = nullptr;
    if (metrology) {
        const ContentHash ann_hash = compute_hash(metrology->annotations_json);
        log.append("store_annotations", kEmptyParams, image_hash, ann_hash);
        report.files[kAnnotationsFile] = metrology->annotations_json;
        const json params = {{"seed", metrology->seed}};
        log.append("metrology", canonical_hash(params), ann_hash,
                   canonical_hash(metrology->result));
        doc["annotations"] = {{"reference", kAnnotationsFile}, {"hash", ann_hash.hex()}};
        doc["metrology"] = metrology->result;
        doc["metrology_params"] = params;
    }

    std::vector<std::string> all_caveats = standard_caveats(image, analyses, metrology);
    for (const auto& c : caveats) {
        if (std::ranges::find(all_caveats, c) == all_caveats.end()) all_caveats.push_back(c);
    }
    doc["caveats"] = all_caveats;
    doc["external_attachments"] = json::array();

    if (options.html) {
        ForensicReport draft = report;
        draft.document = doc;
        draft.audit = log.entries();
        draft.document["audit"] = json::array();
        for (const auto& e : draft.audit) draft.document["audit"].push_back(e.to_json());
        const std::string html = render_report(draft, RenderFormat::html);
        log.append("render_html", kEmptyParams, image_hash, compute_hash(html));
        report.files[kHtmlFile] = to_bytes(html);
    }

    doc["audit"] = json::array();
    for (const auto& e : log.entries()) doc["audit"].push_back(e.to_json());
    report.document = canonicalize(doc);

    const std::string report_json = canonical_dump(report.document);
    log.append("render_report", kEmptyParams, image_hash, compute_hash(report_json));
    report.files[kReportFile] = to_bytes(report_json);

    std::string audit_lines;
    for (const auto& e : log.entries()) audit_lines += canonical_dump(e.to_json()) + "\n";
    report.files[kAuditFile] = to_bytes(audit_lines);
    report.audit = log.entries();
    return report;
}

std::string render_report(const ForensicReport& report, RenderFormat format) {
    if (format == RenderFormat::json) return canonical_dump(report.document);

    const json& doc = report.document;
    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
         << "<title>printproof report " << html_escape(doc["image"]["hash"].get<std::string>())
         << "</title>\n<style>\n"
         << "body{font-family:sans-serif;max-width:960px;margin:2em auto;color:#222}\n"
         << "figure{margin:1.5em 0}figure img{max-width:100%;image-rendering:pixelated}\n"
         << "figcaption{font-size:0.9em;color:#444}\n"
         << "table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:2px 6px;"
         << "font-size:0.85em;text-align:left}\n</style>\n</head>\n<body>\n";
    html << "<h1>Forensic report</h1>\n<p>Image SHA-256 <code>"
         << html_escape(doc["image"]["hash"].get<std::string>()) << "</code>, "
         << doc["image"]["width"].get<int>() << "&times;" << doc["image"]["height"].get<int>()
         << " " << html_escape(doc["image"]["source_format"].get<std::string>()) << "</p>\n";

    if (!doc["caveats"].empty()) {
        html << "<h2>Caveats</h2>\n<ul>\n";
        for (const auto& c : doc["caveats"]) {
            html << "<li>" << html_escape(c.get<std::string>()) << "</li>\n";
        }
        html << "</ul>\n";
    }

    html << "<h2>Analyses</h2>\n";
    int index = 1;
    for (const auto& a : doc["analyses"]) {
        const std::string path = a["map_reference"].get<std::string>();
        html << "<figure>\n";
        auto it = report.files.find(path);
        if (it != report.files.end()) {
            html << "<img alt=\"" << html_escape(a["kind"].get<std::string>())
                 << "\" src=\"data:image/png;base64," << base64(it->second) << "\">\n";
        } else {
            html << "<img alt=\"" << html_escape(a["kind"].get<std::string>()) << "\" src=\""
                 << html_escape(path) << "\">\n";
        }
        html << "<figcaption><b>Fig " << index++ << ".</b> "
             << html_escape(a["kind"].get<std::string>()) << " map; parameters "
             << html_escape(a["params"].dump()) << ". Mean "
             << a["summary_stats"]["mean"].dump() << ", p95 " << a["summary_stats"]["p95"].dump()
             << ", max " << a["summary_stats"]["max"].dump() << ".</figcaption>\n</figure>\n";
    }

    if (!doc["metrology"].is_null()) {
        html << "<h2>Metrology</h2>\n<pre>" << html_escape(doc["metrology"].dump(2))
             << "</pre>\n";
    }

    html << "<h2>Metadata</h2>\n<pre>" << html_escape(doc["image"]["metadata"].dump(2))
         << "</pre>\n";

    html << "<h2>Audit trail</h2>\n<table>\n<tr><th>#</th><th>operation</th><th>timestamp</th>"
         << "<th>output</th></tr>\n";
    int n = 0;
    for (const auto& e : doc["audit"]) {
        html << "<tr><td>" << n++ << "</td><td>" << html_escape(e["operation"].get<std::string>())
             << "</td><td>" << html_escape(e["timestamp"].get<std::string>()) << "</td><td><code>"
             << html_escape(e["output_hash"].get<std::string>().substr(0, 16))
             << "</code></td></tr>\n";
    }
    html << "</table>\n</body>\n</html>\n";
    return html.str();
}

std::vector<AnalysisInput> default_analyses(const RasterImage& image) {
    std::vector<AnalysisInput> out;
    const ContentHash& h = image.source_hash();
    out.push_back({h, filters::ela_map(image)});
    const filters::PcaBasis basis = filters::pca_basis(image);
    out.push_back({h, filters::pca_map(image, basis, 1, filters::PcaMode::projection)});
    out.push_back({h, filters::pca_map(image, basis, 1, filters::PcaMode::distance)});
    out.push_back({h, filters::lga_map(image)});
    out.push_back({h, filters::noise_map(image)});
    return out;
}

void write_report_directory(const ForensicReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [path, bytes] : report.files) write_atomic(dir / path, bytes);
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

VerifyResult verify_report_directory(const std::filesystem::path& dir) {
    VerifyResult r;
    const auto fail = [&](std::string msg) {
        r.ok = false;
        r.problems.push_back(std::move(msg));
    };

    const auto audit_bytes = read_file(dir / kAuditFile);
    if (!audit_bytes) {
        fail("missing audit.jsonl");
        return r;
    }
    ++r.files_checked;
    std::vector<AuditEntry> entries;
    {
        const std::string text = to_text(*audit_bytes);
        std::size_t pos = 0;
        int line_no = 0;
        while (pos < text.size()) {
            const std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) {
                fail("audit.jsonl does not end with a newline");
                break;
            }
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;
            try {
                const json j = json::parse(line);
                if (canonical_dump(j) != line) {
                    fail("audit line " + std::to_string(line_no) + " is not canonical");
                }
                entries.push_back(audit_entry_from_json(j));
            } catch (const std::exception& e) {
                fail("audit line " + std::to_string(line_no) + ": " + e.what());
                return r;
            }
        }
    }
    ContentHash prev;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        ++r.entries_checked;
        if (e.prev != prev) fail("audit entry " + std::to_string(i) + " breaks the chain");
        if (e.compute_entry_hash() != e.entry_hash) {
            fail("audit entry " + std::to_string(i) + " hash mismatch");
        }
        prev = e.entry_hash;
    }
    if (entries.empty() || entries.back().operation != "render_report") {
        fail("audit trail does not end with render_report");
        return r;
    }

    const auto report_bytes = read_file(dir / kReportFile);
    if (!report_bytes) {
        fail("missing report.json");
        return r;
    }
    ++r.files_checked;
    if (compute_hash(*report_bytes) != entries.back().output_hash) {
        fail("report.json hash differs from the final audit entry");
    }
    json doc;
    try {
        doc = json::parse(to_text(*report_bytes));
    } catch (const std::exception& e) {
        fail(std::string("report.json does not parse: ") + e.what());
        return r;
    }
    if (canonical_dump(doc) != to_text(*report_bytes)) fail("report.json is not canonical");
    if (!doc.is_object() || !doc.contains("audit") || !doc["audit"].is_array()) {
        fail("report.json lacks an audit list");
        return r;
    }
    if (doc["audit"].size() + 1 != entries.size()) {
        fail("report.json audit length differs from audit.jsonl");
    } else {
        for (std::size_t i = 0; i < doc["audit"].size(); ++i) {
            if (doc["audit"][i] != entries[i].to_json()) {
                fail("report.json audit entry " + std::to_string(i) + " differs from audit.jsonl");
            }
        }
    }

    const auto find_entry = [&](const std::string& op,
                                const ContentHash& output) -> const AuditEntry* {
        for (const auto& e : entries) {
            if (e.operation == op && e.output_hash == output) return &e;
        }
        return nullptr;
    };
    const auto check_file = [&](const std::string& rel, const std::string& op,
                                const std::optional<std::string>& expected_hex) {
        const auto bytes = read_file(dir / rel);
        ++r.files_checked;
        if (!bytes) {
            fail("missing " + rel);
            return;
        }
        const ContentHash h = compute_hash(*bytes);
        if (expected_hex && h.hex() != *expected_hex) {
            fail(rel + " hash differs from report.json");
        }
        if (find_entry(op, h) == nullptr) fail(rel + " has no matching " + op + " audit entry");
    };

    try {
        const json& image = doc.at("image");
        if (!find_entry("summarize_metadata", canonical_hash(image.at("metadata")))) {
            fail("image metadata differs from its audit entry");
        }
        if (!find_entry("load_image",
                        ContentHash::from_hex(image.at("pixel_hash").get<std::string>()))) {
            fail("pixel hash differs from its audit entry");
        }
        for (const auto& a : doc.at("analyses")) {
            const std::string kind = a.at("kind").get<std::string>();
            check_file(a.at("map_reference").get<std::string>(), "analysis." + kind,
                       a.at("map_hash").get<std::string>());
            if (canonical_hash(a.at("params")).hex() != a.at("params_digest").get<std::string>()) {
                fail(kind + " params differ from their digest");
            }
        }
        if (!doc.at("annotations").is_null()) {
            check_file(doc["annotations"].at("reference").get<std::string>(), "store_annotations",
                       doc["annotations"].at("hash").get<std::string>());
            if (!find_entry("metrology", canonical_hash(doc.at("metrology")))) {
                fail("metrology result differs from its audit entry");
            }
        }
        for (const auto& e : entries) {
            if (e.operation == "render_html") check_file(kHtmlFile, "render_html", std::nullopt);
        }
    } catch (const std::exception& e) {
        fail(std::string("report.json is malformed: ") + e.what());
    }

    std::set<std::string> known = {kReportFile, kAuditFile};
    for (const auto& a : doc.value("analyses", json::array())) {
        if (a.contains("map_reference")) known.insert(a["map_reference"].get<std::string>());
    }
    if (doc.contains("annotations") && doc["annotations"].is_object()) known.insert(kAnnotationsFile);
    for (const auto& e : entries) {
        if (e.operation == "render_html") known.insert(kHtmlFile);
    }
    for (const auto& p : std::filesystem::recursive_directory_iterator(dir)) {
        if (!p.is_regular_file()) continue;
        const std::string rel = std::filesystem::relative(p.path(), dir).generic_string();
        if (!known.contains(rel)) fail("unreferenced file " + rel);
    }
    return r;
}

}  // namespace printproof::report
