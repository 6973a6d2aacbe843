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

#include "printproof/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <regex>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "printproof/codec.hpp"
#include "printproof/filters.hpp"
#include "printproof/metadata.hpp"
#include "printproof/metrology.hpp"
#include "printproof/report.hpp"
#include "printproof/server.hpp"

namespace printproof::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Failure that maps to an exit code and a diagnostic code.
struct CliFailure {
    int exit_code;
    std::string code;
    std::string message;
};

Bytes read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || fs::is_directory(path)) throw CliFailure{kExitInput, "NO_INPUT", "cannot read " + path};
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const fs::path& path, ByteView bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string default_map_path(const std::string& input, std::string_view kind) {
    const fs::path in(input);
    return (in.parent_path() / (in.stem().string() + "." + std::string(kind) + ".png")).string();
}

/// Writes the map and reports it on `out`.
void emit_map(const AnalysisMap& map, const std::string& path, bool as_json, std::ostream& out) {
    const Bytes png = encode_map_png(map);
    write_output(path, png);
    const report::SummaryStats st = report::summary_stats(map);
    if (as_json) {
        out << report::canonical_dump({{"kind", to_string(map.kind)},
                                       {"params", json::parse(map.params_json)},
                                       {"params_digest", map.params_digest.hex()},
                                       {"output", path},
                                       {"output_hash", compute_hash(png).hex()},
                                       {"width", map.width},
                                       {"height", map.height},
                                       {"channels", map.channels},
                                       {"summary_stats",
                                        {{"mean", st.mean}, {"p95", st.p95}, {"max", st.max}}}})
            << "\n";
        return;
    }
    out << to_string(map.kind) << " map " << map.width << "x" << map.height << " written to "
        << path << "\n"
        << "parameters  " << map.params_json << "\n"
        << "mean " << fixed(st.mean, 4) << "  p95 " << fixed(st.p95, 4) << "  max "
        << fixed(st.max, 4) << "\n";
}

std::string point_text(const json& vp) {
    if (vp["at_infinity"].get<bool>()) {
        return "at infinity, direction (" + fixed(vp["point"][0].get<double>(), 4) + ", " +
               fixed(vp["point"][1].get<double>(), 4) + ")";
    }
    return "(" + fixed(vp["x"].get<double>(), 2) + ", " + fixed(vp["y"].get<double>(), 2) + ")";
}

void print_metrology(const json& r, std::ostream& out) {
    for (const auto& [axis, vp] : r["vanishing_points"].items()) {
        out << "VP " << axis << ": " << point_text(vp) << "  rms " << fixed(vp["rms_residual"], 3)
            << " px  support " << vp["support"].get<int>() << "\n";
    }
    if (!r["horizon"].is_null()) {
        out << "Horizon: " << fixed(r["horizon"][0], 6) << " x + " << fixed(r["horizon"][1], 6)
            << " y + " << fixed(r["horizon"][2], 3) << " = 0\n";
    }
    if (!r["tilt"].is_null()) {
        out << "Tilt: left/right " << fixed(r["tilt"]["lr_ratio"], 3) << "  top/bottom "
            << fixed(r["tilt"]["tb_ratio"], 3) << "  verdict "
            << r["tilt"]["verdict"].get<std::string>() << "\n";
    }
    for (const auto& d : r["distortion"]) {
        out << "Distortion " << d["chain_id"].get<std::string>() << ": sagitta "
            << fixed(d["max_sagitta_px"], 2) << " px (" << fixed(d["normalized_sagitta"], 4)
            << ")  " << d["sign"].get<std::string>() << "\n";
    }
    for (const auto& h : r["heights"]) {
        out << "Height " << h["target_id"].get<std::string>() << ": "
            << fixed(h["height_cm"], 1) << " cm  [" << fixed(h["interval_cm"][0], 1) << ", "
            << fixed(h["interval_cm"][1], 1) << "]  (" << h["method"].get<std::string>() << ")\n";
    }
    for (const auto& e : r["errors"]) {
        out << "Unmeasurable " << e["stage"].get<std::string>() << ": "
            << e["code"].get<std::string>() << " " << e["message"].get<std::string>() << "\n";
    }
}

metrology::AnnotationSet load_annotations(const std::string& path, const RasterImage& img) {
    const Bytes raw = read_input(path);
    json j;
    try {
        j = json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidAnnotations, path + ": " + e.what());
    }
    metrology::AnnotationSet ann = metrology::annotations_from_json(j);
    if (ann.image_hash != img.source_hash()) {
        throw Error(ErrorCode::HashMismatch, "annotations reference image " + ann.image_hash.hex() +
                                                 ", input is " + img.source_hash().hex());
    }
    const auto problems = metrology::check_annotations(ann, img.width(), img.height());
    if (!problems.empty()) {
        throw Error(ErrorCode::InvalidAnnotations,
                    problems.front().field + ": " + problems.front().message);
    }
    return ann;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"printproof: forensic image analysis (metadata, ELA, PCA, LGA, noise, "
                 "single-view metrology, audited reports)",
                 "printproof"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "printproof 0.1.0");

    std::string input;
    std::string output;
    bool as_json = false;
    std::uint64_t seed = 0;

    auto* meta = app.add_subcommand("meta", "List container metadata (JFIF, SOF, EXIF, IPTC, ICC, DQT)");
    meta->add_option("file", input, "JPEG or PNG file")->required();
    meta->add_flag("--json", as_json, "Canonical JSON instead of the listing");

    filters::ElaParams ela_p;
    auto* ela = app.add_subcommand("ela", "Error level analysis map");
    ela->add_option("file", input, "JPEG or PNG file")->required();
    ela->add_option("-o,--output", output, "Output PNG (default <stem>.ela.png)");
    ela->add_option("--quality", ela_p.quality, "Recompression quality")
        ->check(CLI::Range(1, 100))
        ->capture_default_str();
    ela->add_option("--scale", ela_p.scale, "Amplification, factor scale/10")
        ->check(CLI::Range(0, 100))
        ->capture_default_str();
    ela->add_option("--contrast", ela_p.contrast, "Stretch ceiling at the (100-contrast)th percentile")
        ->check(CLI::Range(0, 100))
        ->capture_default_str();
    ela->add_flag("--json", as_json, "Canonical JSON summary");

    int pca_component = 1;
    std::string pca_mode = "projection";
    auto* pca = app.add_subcommand("pca", "Principal component map of pixel colours");
    pca->add_option("file", input, "JPEG or PNG file")->required();
    pca->add_option("-o,--output", output, "Output PNG (default <stem>.<kind>.png)");
    pca->add_option("--component", pca_component, "Principal component (1-based)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    pca->add_option("--mode", pca_mode, "projection or distance")
        ->check(CLI::IsMember({"projection", "distance"}))
        ->capture_default_str();
    pca->add_flag("--json", as_json, "Canonical JSON summary");

    filters::LgaParams lga_p;
    std::string lga_channel = std::string(to_string(lga_p.channel));
    auto* lga = app.add_subcommand("lga", "Luminance gradient map");
    lga->add_option("file", input, "JPEG or PNG file")->required();
    lga->add_option("-o,--output", output, "Output PNG (default <stem>.lga.png)");
    lga->add_option("--intensity", lga_p.intensity, "Gain percentage")
        ->check(CLI::Range(0, 100))
        ->capture_default_str();
    lga->add_option("--channel", lga_channel, "red, green, blue or luminance")
        ->check(CLI::IsMember({"red", "green", "blue", "luminance"}))
        ->capture_default_str();
    lga->add_option("--normalized", lga_p.normalized,
                    "Scale by the strongest gradient (true) or use a fixed gain (false)")
        ->default_str("true");
    lga->add_flag("--json", as_json, "Canonical JSON summary");

    filters::NoiseParams noise_p;
    auto* noise = app.add_subcommand("noise", "Median-filter noise residual map");
    noise->add_option("file", input, "JPEG or PNG file")->required();
    noise->add_option("-o,--output", output, "Output PNG (default <stem>.noise.png)");
    noise->add_option("--radius", noise_p.radius, "Median window radius")
        ->check(CLI::Range(1, 15))
        ->capture_default_str();
    noise->add_option("--gain", noise_p.gain, "Residual amplification")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    noise->add_flag("--json", as_json, "Canonical JSON summary");

    std::string annotations;
    auto* metro = app.add_subcommand("metrology", "Vanishing points, tilt, distortion and heights");
    metro->add_option("file", input, "JPEG or PNG file")->required();
    metro->add_option("--annotations", annotations, "Annotation JSON")->required();
    metro->add_option("--seed", seed, "Perturbation seed")->capture_default_str();
    metro->add_flag("--json", as_json, "Canonical JSON output");

    std::string fixed_time;
    bool html = false;
    auto* rep = app.add_subcommand("report", "Audited report directory");
    rep->add_option("file", input, "JPEG or PNG file")->required();
    rep->add_option("--annotations", annotations, "Annotation JSON for metrology");
    rep->add_option("-o,--output", output, "Report directory")->required();
    rep->add_option("--seed", seed, "Perturbation seed")->capture_default_str();
    rep->add_option("--fixed-time", fixed_time, "Timestamp for every audit entry (YYYY-MM-DDTHH:MM:SSZ)")
        ->check(CLI::Validator(
            [](std::string& v) -> std::string {
                static const std::regex iso(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
                return std::regex_match(v, iso) ? std::string() : "expected YYYY-MM-DDTHH:MM:SSZ";
            },
            "ISO8601"));
    rep->add_flag("--html", html, "Also write report.html");
    rep->add_flag("--json", as_json, "Print report.json to stdout");

    auto* ver = app.add_subcommand("verify", "Recheck every hash in a report directory");
    ver->add_option("dir", input, "Report directory")->required();
    ver->add_flag("--json", as_json, "Canonical JSON result");

    server::ServerOptions serve_opts;
    std::string static_dir;
    std::string workdir = serve_opts.workdir.string();
    int timeout_s = static_cast<int>(serve_opts.timeout.count());
    auto* serve = app.add_subcommand("serve", "HTTP API and examiner UI");
    serve->add_option("--port", serve_opts.port, "TCP port (0 picks a free one)")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    serve->add_option("--host", serve_opts.host, "Bind address")->capture_default_str();
    serve->add_option("--dir", workdir, "Working directory")->capture_default_str();
    serve->add_option("--static", static_dir, "Examiner UI bundle served at /");
    serve->add_option("--timeout", timeout_s, "Request timeout in seconds")
        ->check(CLI::Range(1, 3600))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        CLI::App* target = &app;
        for (CLI::App* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[BAD_FLAG]: " << e.what() << "\n";
        return kExitFlag;
    }

    try {
        if (meta->parsed()) {
            const Bytes bytes = read_input(input);
            const auto summary = metadata::summarize(bytes);
            if (as_json) {
                out << report::canonical_dump(metadata::to_json(summary)) << "\n";
            } else {
                out << metadata::format_listing(summary);
            }
            return kExitOk;
        }
        if (ela->parsed() || pca->parsed() || lga->parsed() || noise->parsed()) {
            const Bytes bytes = read_input(input);
            const RasterImage img = load_image(bytes);
            AnalysisMap map;
            if (ela->parsed()) {
                map = filters::ela_map(img, ela_p);
            } else if (pca->parsed()) {
                map = filters::pca_map(img, filters::pca_basis(img), pca_component,
                                       filters::pca_mode_from_string(pca_mode));
            } else if (lga->parsed()) {
                lga_p.channel = channel_from_string(lga_channel);
                map = filters::lga_map(img, lga_p);
            } else {
                map = filters::noise_map(img, noise_p);
            }
            emit_map(map, output.empty() ? default_map_path(input, to_string(map.kind)) : output,
                     as_json, out);
            return kExitOk;
        }
        if (metro->parsed()) {
            const Bytes bytes = read_input(input);
            const RasterImage img = load_image(bytes);
            const auto ann = load_annotations(annotations, img);
            const json result = metrology::run_metrology(ann, img.width(), img.height(), seed);
            if (as_json) {
                out << report::canonical_dump(result) << "\n";
            } else {
                print_metrology(result, out);
            }
            return kExitOk;
        }
        if (rep->parsed()) {
            const Bytes bytes = read_input(input);
            const RasterImage img = load_image(bytes);
            std::optional<report::MetrologyInput> metro_in;
            if (!annotations.empty()) {
                const auto ann = load_annotations(annotations, img);
                metro_in = report::MetrologyInput{
                    read_input(annotations),
                    metrology::run_metrology(ann, img.width(), img.height(), seed), seed};
            }
            report::ReportOptions opts;
            if (!fixed_time.empty()) opts.fixed_time = fixed_time;
            opts.html = html;
            const auto r = report::build_report(img, metadata::summarize(bytes),
                                                report::default_analyses(img), metro_in, {}, opts);
            report::write_report_directory(r, output);
            if (as_json) {
                out << report::render_report(r, report::RenderFormat::json) << "\n";
            } else {
                out << "report written to " << output << " (" << r.files.size() << " files, "
                    << r.audit.size() << " audit entries)\n";
            }
            return kExitOk;
        }
        if (ver->parsed()) {
            if (!fs::is_directory(input)) {
                throw CliFailure{kExitInput, "NO_INPUT", "not a directory: " + input};
            }
            const auto v = report::verify_report_directory(input);
            if (as_json) {
                out << report::canonical_dump({{"ok", v.ok},
                                               {"problems", v.problems},
                                               {"entries_checked", v.entries_checked},
                                               {"files_checked", v.files_checked}})
                    << "\n";
            } else if (v.ok) {
                out << "OK: " << v.entries_checked << " audit entries, " << v.files_checked
                    << " files verified\n";
            }
            if (!v.ok) {
                for (const auto& p : v.problems) err << "  " << p << "\n";
                throw Error(ErrorCode::VerifyFailed,
                            std::to_string(v.problems.size()) + " problem(s) in " + input);
            }
            return kExitOk;
        }
        if (serve->parsed()) {
            serve_opts.workdir = workdir;
            if (!static_dir.empty()) serve_opts.static_dir = static_dir;
            serve_opts.timeout = std::chrono::seconds(timeout_s);
            server::Server srv(serve_opts);
            const int port = srv.bind();
            out << "printproof serving http://" << serve_opts.host << ":" << port << "/ (workdir "
                << workdir << ")" << std::endl;
            srv.listen();
            return kExitOk;
        }
    } catch (const CliFailure& f) {
        err << "error[" << f.code << "]: " << f.message << "\n";
        return f.exit_code;
    } catch (const filters::InvalidParam& e) {
        err << "error[BAD_FLAG]: " << e.what() << "\n";
        return kExitFlag;
    } catch (const Error& e) {
        err << "error[" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error[IO]: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace printproof::cli
