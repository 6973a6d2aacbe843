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

#ifndef PRINTPROOF_ERROR_HPP
#define PRINTPROOF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace printproof {

enum class ErrorCode {
    // core
    UnsupportedFormat,
    CorruptStream,
    InvalidPercentile,
    EncodeFailure,
    // metadata
    NotAJpeg,
    TruncatedStream,
    NoFrameHeader,
    MultipleFrameHeaders,
    BadTiffHeader,
    IfdOffsetOutOfBounds,
    NoIptcResource,
    MissingChunk,
    BadProfileSignature,
    NoQuantTables,
    // filters
    DegenerateImage,
    ImageTooSmall,
    // metrology
    DegenerateSegments,
    TooFewSegments,
    HorizonThroughBase,
    MissingReference,
    ZeroLengthSegment,
    ChainTooShort,
    IdenticalVPs,
    InvalidAnnotations,
    // report
    HashMismatch,
    VerifyFailed,
    // generic
    InvalidArgument,
    Io,
};

/// Stable upper-snake identifier, used in CLI diagnostics ("error[CODE]:")
/// and in HTTP error bodies.
[[nodiscard]] std::string_view error_code_name(ErrorCode code) noexcept;

/// The single exception type thrown by the library. Every failure that a
/// caller can act on carries a code; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace printproof

#endif  // PRINTPROOF_ERROR_HPP
