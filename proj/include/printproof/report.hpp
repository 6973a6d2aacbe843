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

#ifndef PRINTPROOF_REPORT_HPP
#define PRINTPROOF_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "printproof/core.hpp"
#include "printproof/error.hpp"
#include "printproof/metadata.hpp"

namespace printproof::report {

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

/// Rounds every floating-point number to 6 significant digits.
[[nodiscard]] nlohmann::json canonicalize(const nlohmann::json& j);

/// Sorted keys, no insignificant whitespace, floats at 6 significant digits.
[[nodiscard]] std::string canonical_dump(const nlohmann::json& j);

[[nodiscard]] ContentHash canonical_hash(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Audit trail
// ---------------------------------------------------------------------------

struct AuditEntry {
    std::string timestamp;  // UTC, YYYY-MM-DDTHH:MM:SSZ
    std::string operation;
    ContentHash params_digest;
    ContentHash input_hash;
    ContentHash output_hash;
    ContentHash prev;        // entry_hash of the previous entry, zero for the first
    ContentHash entry_hash;  // hash of the canonical entry without this field

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] ContentHash compute_entry_hash() const;
};

[[nodiscard]] AuditEntry audit_entry_from_json(const nlohmann::json& j);

/// Appends an entry linked to the current tail.
class AuditLog {
public:
    explicit AuditLog(std::string timestamp) : timestamp_(std::move(timestamp)) {}

    const AuditEntry& append(std::string operation, const ContentHash& params_digest,
                             const ContentHash& input_hash, const ContentHash& output_hash);

    [[nodiscard]] const std::vector<AuditEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::string& timestamp() const noexcept { return timestamp_; }

private:
    std::string timestamp_;
    std::vector<AuditEntry> entries_;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
[[nodiscard]] std::string utc_now();

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct AnalysisInput {
    ContentHash image_hash;
    AnalysisMap map;
};

struct MetrologyInput {
    Bytes annotations_json;  // as supplied
    nlohmann::json result;   // run_metrology output
    std::uint64_t seed = 0;
};

struct ReportOptions {
    /// Timestamp for every audit entry; the wall clock when unset.
    std::optional<std::string> fixed_time;
    bool html = false;
};

struct SummaryStats {
    double mean = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

[[nodiscard]] SummaryStats summary_stats(const AnalysisMap& map);

struct ForensicReport {
    /// report.json content.
    nlohmann::json document;
    /// Relative path -> bytes for every file in the report directory,
    /// report.json and audit.jsonl included.
    std::map<std::string, Bytes> files;
    std::vector<AuditEntry> audit;
};

/// Throws Error(HashMismatch) when an analysis belongs to another image.
[[nodiscard]] ForensicReport build_report(const RasterImage& image,
                                          const metadata::MetadataSummary& summary,
                                          const std::vector<AnalysisInput>& analyses,
                                          const std::optional<MetrologyInput>& metrology,
                                          const std::vector<std::string>& caveats,
                                          const ReportOptions& options = {});

enum class RenderFormat { json, html };

/// json: the canonical report.json bytes. html: figures per analysis with
/// embedded PNG maps and parameter captions.
[[nodiscard]] std::string render_report(const ForensicReport& report, RenderFormat format);

/// Default analysis set: ELA, PCA projection and distance on the first
/// component, LGA and noise, each with default parameters.
[[nodiscard]] std::vector<AnalysisInput> default_analyses(const RasterImage& image);

/// Writes every file atomically (temporary file, then rename).
void write_report_directory(const ForensicReport& report, const std::filesystem::path& dir);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> problems;
    int entries_checked = 0;
    int files_checked = 0;
};

/// Recomputes every hash in a report directory: the audit chain, each
/// artifact against its audit entry and report.json against the final
/// entry.
[[nodiscard]] VerifyResult verify_report_directory(const std::filesystem::path& dir);

}  // namespace printproof::report

#endif  // PRINTPROOF_REPORT_HPP
