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

#include "printproof/server.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "printproof/codec.hpp"
#include "printproof/filters.hpp"
#include "printproof/metadata.hpp"
#include "printproof/metrology.hpp"
#include "printproof/report.hpp"

namespace printproof::server {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kJson = "application/json";
constexpr const char* kHashPattern = "([0-9a-f]{64})";

const char* kPlaceholderPage = R"(<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>printproof</title></head>
<body>
<h1>printproof examiner API</h1>
<p>No examiner bundle is installed. Start the server with <code>--static DIR</code> to serve one.</p>
<ul>
<li>POST /api/images (multipart field "file")</li>
<li>GET /api/images/{id}/meta</li>
<li>GET /api/images/{id}/analysis/{ela|pca|pca_projection|pca_distance|lga|noise}?params</li>
<li>PUT /api/images/{id}/annotations/{name}</li>
<li>GET /api/images/{id}/annotations/{name}</li>
<li>GET /api/images/{id}/metrology?annotations={name}&amp;seed=N</li>
<li>GET /api/images/{id}/report</li>
<li>GET /api/images/{id}/pixels?x=&amp;y=&amp;r=</li>
<li>GET /api/schema/annotations</li>
</ul>
</body>
</html>
)";

std::optional<Bytes> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_atomic(const fs::path& path, ByteView bytes) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(
                                                      std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(report::canonical_dump(body), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& msg,
                const std::optional<std::string>& field = std::nullopt) {
    json body = {{"error", code}, {"message", msg}};
    if (field) body["field"] = *field;
    send_json(res, status, body);
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnsupportedFormat:
        case ErrorCode::CorruptStream:
        case ErrorCode::NotAJpeg: return 415;
        case ErrorCode::HashMismatch: return 409;
        case ErrorCode::Io: return 500;
        default: return 422;
    }
}

int parse_int(const httplib::Request& req, const std::string& field, int fallback) {
    if (!req.has_param(field)) return fallback;
    const std::string v = req.get_param_value(field);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw filters::InvalidParam(field, "expected an integer, got '" + v + "'");
    }
    return out;
}

double parse_double(const httplib::Request& req, const std::string& field, double fallback) {
    if (!req.has_param(field)) return fallback;
    const std::string v = req.get_param_value(field);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out)) {
        throw filters::InvalidParam(field, "expected a number, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const httplib::Request& req, const std::string& field, bool fallback) {
    if (!req.has_param(field)) return fallback;
    const std::string v = req.get_param_value(field);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw filters::InvalidParam(field, "expected true or false, got '" + v + "'");
}

void reject_unknown(const httplib::Request& req, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : req.params) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; })) {
            throw filters::InvalidParam(key, "unknown parameter");
        }
    }
}

/// Validated parameters plus the function that renders the map.
struct AnalysisPlan {
    std::string params_json;
    std::function<AnalysisMap(const RasterImage&)> run;
};

AnalysisPlan plan_analysis(const std::string& kind, const httplib::Request& req) {
    if (kind == "ela") {
        reject_unknown(req, {"quality", "scale", "contrast"});
        filters::ElaParams p;
        p.quality = parse_int(req, "quality", p.quality);
        p.scale = parse_int(req, "scale", p.scale);
        p.contrast = parse_int(req, "contrast", p.contrast);
        filters::validate(p);
        return {filters::params_json(p), [p](const RasterImage& img) { return filters::ela_map(img, p); }};
    }
    if (kind == "pca" || kind == "pca_projection" || kind == "pca_distance") {
        filters::PcaMode mode = kind == "pca_distance" ? filters::PcaMode::distance
                                                       : filters::PcaMode::projection;
        if (kind == "pca") {
            reject_unknown(req, {"component", "mode"});
            if (req.has_param("mode")) {
                try {
                    mode = filters::pca_mode_from_string(req.get_param_value("mode"));
                } catch (const Error& e) {
                    throw filters::InvalidParam("mode", e.what());
                }
            }
        } else {
            reject_unknown(req, {"component"});
        }
        const int component = parse_int(req, "component", 1);
        if (component < 1 || component > 3) {
            throw filters::InvalidParam("component", "must be 1, 2 or 3");
        }
        return {filters::pca_params_json(component, mode), [component, mode](const RasterImage& img) {
                    return filters::pca_map(img, filters::pca_basis(img), component, mode);
                }};
    }
    if (kind == "lga") {
        reject_unknown(req, {"intensity", "channel", "normalized"});
        filters::LgaParams p;
        p.intensity = parse_int(req, "intensity", p.intensity);
        if (req.has_param("channel")) {
            try {
                p.channel = channel_from_string(req.get_param_value("channel"));
            } catch (const Error& e) {
                throw filters::InvalidParam("channel", e.what());
            }
        }
        p.normalized = parse_bool(req, "normalized", p.normalized);
        filters::validate(p);
        return {filters::params_json(p), [p](const RasterImage& img) { return filters::lga_map(img, p); }};
    }
    if (kind == "noise") {
        reject_unknown(req, {"radius", "gain"});
        filters::NoiseParams p;
        p.radius = parse_int(req, "radius", p.radius);
        p.gain = parse_double(req, "gain", p.gain);
        filters::validate(p);
        return {filters::params_json(p), [p](const RasterImage& img) { return filters::noise_map(img, p); }};
    }
    throw filters::InvalidParam("kind", "unknown analysis '" + kind + "'");
}

bool valid_name(const std::string& name) {
    static const std::regex pattern("[A-Za-z0-9_.-]{1,64}");
    return std::regex_match(name, pattern) && name != "." && name != "..";
}

}  // namespace

struct Server::Impl {
    ServerOptions options;
    httplib::Server http;
    int bound_port = -1;

    std::mutex cache_mu;
    std::map<std::string, std::shared_future<Bytes>> inflight;
    std::mutex annotations_mu;

    explicit Impl(ServerOptions o) : options(std::move(o)) {}

    fs::path images_dir() const { return options.workdir / "images"; }

    std::optional<fs::path> image_path(const std::string& id) const {
        for (const char* ext : {".jpg", ".png"}) {
            fs::path p = images_dir() / (id + ext);
            if (fs::exists(p)) return p;
        }
        return std::nullopt;
    }

    std::optional<Bytes> image_bytes(const std::string& id) const {
        const auto p = image_path(id);
        if (!p) return std::nullopt;
        return read_file(*p);
    }

    /// Returns the map bytes and whether they were served without computing.
    std::pair<Bytes, bool> cached_map(const fs::path& path,
                                      const std::function<Bytes()>& compute) {
        const std::string key = path.string();
        std::promise<Bytes> promise;
        std::shared_future<Bytes> future;
        bool owner = false;
        {
            std::lock_guard lock(cache_mu);
            if (auto it = inflight.find(key); it != inflight.end()) {
                future = it->second;
            } else if (auto bytes = read_file(path)) {
                return {std::move(*bytes), true};
            } else {
                future = promise.get_future().share();
                inflight.emplace(key, future);
                owner = true;
            }
        }
        if (!owner) return {future.get(), true};
        try {
            Bytes bytes = compute();
            write_atomic(path, bytes);
            promise.set_value(bytes);
            std::lock_guard lock(cache_mu);
            inflight.erase(key);
            return {std::move(bytes), false};
        } catch (...) {
            promise.set_exception(std::current_exception());
            std::lock_guard lock(cache_mu);
            inflight.erase(key);
            throw;
        }
    }

    void routes();
    void with_image(const httplib::Request& req, httplib::Response& res,
                    const std::function<void(const std::string&, const Bytes&)>& fn);
};

void Server::Impl::with_image(const httplib::Request& req, httplib::Response& res,
                              const std::function<void(const std::string&, const Bytes&)>& fn) {
    const std::string id = req.matches[1];
    const auto bytes = image_bytes(id);
    if (!bytes) {
        send_error(res, 404, "NOT_FOUND", "unknown image " + id);
        return;
    }
    try {
        fn(id, *bytes);
    } catch (const filters::InvalidParam& e) {
        send_error(res, 422, "INVALID_PARAM", e.what(), e.field());
    } catch (const Error& e) {
        send_error(res, status_for(e.code()), error_code_name(e.code()), e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "INTERNAL", e.what());
    }
}

void Server::Impl::routes() {
    const std::string base = std::string("/api/images/") + kHashPattern;

    http.Post("/api/images", [this](const httplib::Request& req, httplib::Response& res) {
        const httplib::MultipartFormData* file = nullptr;
        if (req.has_file("file")) {
            file = &req.files.find("file")->second;
        } else if (!req.files.empty()) {
            file = &req.files.begin()->second;
        }
        if (file == nullptr) {
            send_error(res, 400, "NO_INPUT", "multipart field 'file' is missing");
            return;
        }
        const ByteView bytes = as_bytes(file->content);
        try {
            const RasterImage img = load_image(bytes);
            const std::string id = img.source_hash().hex();
            const char* ext = img.source_format() == SourceFormat::png ? ".png" : ".jpg";
            const fs::path path = images_dir() / (id + ext);
            if (!fs::exists(path)) write_atomic(path, bytes);
            send_json(res, 200,
                      {{"image_id", id},
                       {"width", img.width()},
                       {"height", img.height()},
                       {"format", to_string(img.source_format())}});
        } catch (const Error& e) {
            send_error(res, 415, error_code_name(e.code()), e.what());
        }
    });

    http.Get(base + "/meta", [this](const httplib::Request& req, httplib::Response& res) {
        with_image(req, res, [&](const std::string&, const Bytes& bytes) {
            send_json(res, 200, metadata::to_json(metadata::summarize(bytes)));
        });
    });

    http.Get(base + "/analysis/([a-z_]+)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
        with_image(req, res, [&](const std::string& id, const Bytes& bytes) {
            const AnalysisPlan plan = plan_analysis(req.matches[2], req);
            const ContentHash digest = compute_hash(plan.params_json);
            const std::string kind = json::parse(plan.params_json).value("kind", "map");
            const fs::path path = options.workdir / "maps" / id / (kind + "-" + digest.hex() + ".png");
            auto [png, hit] = cached_map(path, [&] {
                return encode_map_png(plan.run(load_image(bytes)));
            });
            res.set_header("X-Cache", hit ? "hit" : "miss");
            res.set_header("X-Params-Digest", digest.hex());
            res.status = 200;
            res.set_content(std::string(png.begin(), png.end()), "image/png");
        });
    });

    http.Put(base + "/annotations/([^/]+)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
        with_image(req, res, [&](const std::string& id, const Bytes& bytes) {
            const std::string name = req.matches[2];
            if (!valid_name(name)) throw filters::InvalidParam("name", "invalid annotation name");
            json body;
            try {
                body = json::parse(req.body);
            } catch (const std::exception& e) {
                send_error(res, 422, "INVALID_ANNOTATIONS", e.what(), std::string("body"));
                return;
            }
            metrology::AnnotationSet ann;
            try {
                ann = metrology::annotations_from_json(body);
            } catch (const Error& e) {
                const std::string msg = e.what();
                send_error(res, 422, "INVALID_ANNOTATIONS", msg, msg.substr(0, msg.find(':')));
                return;
            }
            if (ann.image_hash.hex() != id) {
                send_error(res, 409, "HASH_MISMATCH",
                           "annotations reference image " + ann.image_hash.hex());
                return;
            }
            const RasterImage img = load_image(bytes);
            const auto problems = metrology::check_annotations(ann, img.width(), img.height());
            if (!problems.empty()) {
                json list = json::array();
                for (const auto& p : problems) list.push_back({{"field", p.field}, {"message", p.message}});
                send_json(res, 422, {{"error", "INVALID_ANNOTATIONS"},
                                     {"field", problems.front().field},
                                     {"message", problems.front().message},
                                     {"problems", list}});
                return;
            }
            const std::string canonical = report::canonical_dump(metrology::to_json(ann));
            {
                std::lock_guard lock(annotations_mu);
                write_atomic(options.workdir / "annotations" / id / (name + ".json"),
                             as_bytes(canonical));
            }
            send_json(res, 200, {{"name", name}, {"hash", compute_hash(canonical).hex()}});
        });
    });

    http.Get(base + "/annotations/([^/]+)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
        with_image(req, res, [&](const std::string& id, const Bytes&) {
            const std::string name = req.matches[2];
            if (!valid_name(name)) throw filters::InvalidParam("name", "invalid annotation name");
            const auto stored = read_file(options.workdir / "annotations" / id / (name + ".json"));
            if (!stored) {
                send_error(res, 404, "NOT_FOUND", "no annotations named " + name);
                return;
            }
            res.status = 200;
            res.set_content(std::string(stored->begin(), stored->end()), kJson);
        });
    });

    http.Get(base + "/metrology", [this](const httplib::Request& req, httplib::Response& res) {
        with_image(req, res, [&](const std::string& id, const Bytes& bytes) {
            reject_unknown(req, {"annotations", "seed"});
            const std::string name = req.has_param("annotations")
                                         ? req.get_param_value("annotations")
                                         : std::string("default");
            if (!valid_name(name)) throw filters::InvalidParam("annotations", "invalid name");
            const int seed = parse_int(req, "seed", 0);
            if (seed < 0) throw filters::InvalidParam("seed", "must be >= 0");
            const auto stored = read_file(options.workdir / "annotations" / id / (name + ".json"));
            if (!stored) {
                send_error(res, 404, "NOT_FOUND", "no annotations named " + name);
                return;
            }
            const auto ann = metrology::annotations_from_json(
                json::parse(std::string(stored->begin(), stored->end())));
            const RasterImage img = load_image(bytes);
            send_json(res, 200,
                      metrology::run_metrology(ann, img.width(), img.height(),
                                               static_cast<std::uint64_t>(seed)));
        });
    });

    http.Get(base + "/report", [this](const httplib::Request& req, httplib::Response& res) {
        with_image(req, res, [&](const std::string& id, const Bytes& bytes) {
            reject_unknown(req, {"annotations", "seed", "fixed_time"});
            const RasterImage img = load_image(bytes);
            std::optional<report::MetrologyInput> metro;
            if (req.has_param("annotations")) {
                const std::string name = req.get_param_value("annotations");
                if (!valid_name(name)) throw filters::InvalidParam("annotations", "invalid name");
                const auto stored =
                    read_file(options.workdir / "annotations" / id / (name + ".json"));
                if (!stored) {
                    send_error(res, 404, "NOT_FOUND", "no annotations named " + name);
                    return;
                }
                const int seed = parse_int(req, "seed", 0);
                if (seed < 0) throw filters::InvalidParam("seed", "must be >= 0");
                const auto ann = metrology::annotations_from_json(
                    json::parse(std::string(stored->begin(), stored->end())));
                metro = report::MetrologyInput{
                    *stored,
                    metrology::run_metrology(ann, img.width(), img.height(),
                                             static_cast<std::uint64_t>(seed)),
                    static_cast<std::uint64_t>(seed)};
            }
            report::ReportOptions ro;
            if (req.has_param("fixed_time")) ro.fixed_time = req.get_param_value("fixed_time");
            const auto r = report::build_report(img, metadata::summarize(bytes),
                                                report::default_analyses(img), metro, {}, ro);
            res.status = 200;
            res.set_content(report::render_report(r, report::RenderFormat::json), kJson);
        });
    });

    http.Get(base + "/pixels", [this](const httplib::Request& req, httplib::Response& res) {
        with_image(req, res, [&](const std::string&, const Bytes& bytes) {
            reject_unknown(req, {"x", "y", "r"});
            if (!req.has_param("x")) throw filters::InvalidParam("x", "required");
            if (!req.has_param("y")) throw filters::InvalidParam("y", "required");
            const int x = parse_int(req, "x", 0);
            const int y = parse_int(req, "y", 0);
            const int r = parse_int(req, "r", 0);
            if (r < 0 || r > 32) throw filters::InvalidParam("r", "must be in 0..32");
            const RasterImage img = load_image(bytes);
            if (x < 0 || x >= img.width()) throw filters::InvalidParam("x", "outside the image");
            if (y < 0 || y >= img.height()) throw filters::InvalidParam("y", "outside the image");
            const int x0 = std::max(0, x - r), x1 = std::min(img.width() - 1, x + r);
            const int y0 = std::max(0, y - r), y1 = std::min(img.height() - 1, y + r);
            json rows = json::array();
            for (int yy = y0; yy <= y1; ++yy) {
                json row = json::array();
                for (int xx = x0; xx <= x1; ++xx) {
                    const Rgb& p = img.at(xx, yy);
                    row.push_back({p.r, p.g, p.b});
                }
                rows.push_back(std::move(row));
            }
            send_json(res, 200,
                      {{"x", x},
                       {"y", y},
                       {"r", r},
                       {"origin", {x0, y0}},
                       {"width", x1 - x0 + 1},
                       {"height", y1 - y0 + 1},
                       {"pixels", rows}});
        });
    });

    http.Get("/api/schema/annotations", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(metrology::annotation_schema()), "application/schema+json");
    });

    const bool has_static = options.static_dir && fs::is_directory(*options.static_dir) &&
                            http.set_mount_point("/", options.static_dir->string());
    if (!has_static) {
        http.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
    fs::create_directories(impl_->images_dir());
    impl_->http.set_read_timeout(impl_->options.timeout);
    impl_->http.set_write_timeout(impl_->options.timeout);
    impl_->http.set_payload_max_length(256u << 20);
    impl_->routes();
}

Server::~Server() { stop(); }

int Server::bind() {
    if (impl_->bound_port >= 0) return impl_->bound_port;
    int port = -1;
    if (impl_->options.port == 0) {
        port = impl_->http.bind_to_any_port(impl_->options.host);
    } else if (impl_->http.bind_to_port(impl_->options.host, impl_->options.port)) {
        port = impl_->options.port;
    }
    if (port < 0) {
        throw Error(ErrorCode::Io, "cannot bind " + impl_->options.host + ":" +
                                       std::to_string(impl_->options.port));
    }
    impl_->bound_port = port;
    return port;
}

void Server::listen() {
    bind();
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (impl_) impl_->http.stop();
}

int Server::port() const noexcept { return impl_->bound_port; }

}  // namespace printproof::server
