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

#ifndef PRINTPROOF_METADATA_BYTE_READER_HPP
#define PRINTPROOF_METADATA_BYTE_READER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "printproof/core.hpp"

namespace printproof::metadata::detail {

// Bounds-checked random access over an untrusted buffer. Every accessor
// returns nullopt instead of reading past the end.
class ByteReader {
public:
    explicit ByteReader(ByteView data, bool big_endian = true) noexcept
        : data_(data), big_endian_(big_endian) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] ByteView data() const noexcept { return data_; }
    [[nodiscard]] bool big_endian() const noexcept { return big_endian_; }

    [[nodiscard]] bool has(std::uint64_t pos, std::uint64_t len) const noexcept {
        return pos <= data_.size() && len <= data_.size() - pos;
    }

    [[nodiscard]] std::optional<std::uint8_t> u8(std::uint64_t pos) const noexcept {
        if (!has(pos, 1)) return std::nullopt;
        return data_[static_cast<std::size_t>(pos)];
    }

    [[nodiscard]] std::optional<std::uint16_t> u16(std::uint64_t pos) const noexcept {
        if (!has(pos, 2)) return std::nullopt;
        const auto a = data_[static_cast<std::size_t>(pos)];
        const auto b = data_[static_cast<std::size_t>(pos) + 1];
        return big_endian_ ? static_cast<std::uint16_t>((a << 8) | b)
                           : static_cast<std::uint16_t>((b << 8) | a);
    }

    [[nodiscard]] std::optional<std::uint32_t> u32(std::uint64_t pos) const noexcept {
        if (!has(pos, 4)) return std::nullopt;
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const auto byte = data_[static_cast<std::size_t>(pos) +
                                    static_cast<std::size_t>(big_endian_ ? i : 3 - i)];
            v = (v << 8) | byte;
        }
        return v;
    }

    [[nodiscard]] std::optional<ByteView> slice(std::uint64_t pos, std::uint64_t len) const noexcept {
        if (!has(pos, len)) return std::nullopt;
        return data_.subspan(static_cast<std::size_t>(pos), static_cast<std::size_t>(len));
    }

    [[nodiscard]] std::optional<std::string> text(std::uint64_t pos, std::uint64_t len) const {
        auto s = slice(pos, len);
        if (!s) return std::nullopt;
        return std::string(s->begin(), s->end());
    }

    [[nodiscard]] bool starts_with(std::string_view prefix) const noexcept {
        if (!has(0, prefix.size())) return false;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            if (data_[i] != static_cast<std::uint8_t>(prefix[i])) return false;
        }
        return true;
    }

private:
    ByteView data_;
    bool big_endian_;
};

}  // namespace printproof::metadata::detail

#endif  // PRINTPROOF_METADATA_BYTE_READER_HPP
