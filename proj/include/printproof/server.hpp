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

#ifndef PRINTPROOF_SERVER_HPP
#define PRINTPROOF_SERVER_HPP

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace printproof::server {

inline constexpr int kDefaultPort = 8745;

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;  // 0 binds any free port
    std::filesystem::path workdir = "printproof-work";
    /// Static examiner bundle served at "/"; a placeholder page when unset.
    std::optional<std::filesystem::path> static_dir;
    std::chrono::seconds timeout{30};
};

/// REST API under /api backed by a content-addressed working directory:
///   images/<sha256>.<jpg|png>
///   maps/<sha256>/<kind>-<params digest>.png
///   annotations/<sha256>/<name>.json
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket; returns the bound port. Throws Error(Io).
    int bind();
    /// Serves until stop(). Binds first when bind() was not called.
    void listen();
    void stop();

    [[nodiscard]] int port() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace printproof::server

#endif  // PRINTPROOF_SERVER_HPP
