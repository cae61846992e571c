/* Copyright 2026 The qdmtk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qdm {

// Broad categories, mapped to distinct process exit codes by the CLI.
enum class ErrorCategory { format, validation, processing };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, std::string msg)
        : std::runtime_error(std::move(msg)), cat_(cat) {}
    ErrorCategory category() const noexcept { return cat_; }

private:
    ErrorCategory cat_;
};

// Malformed or corrupt container files.
class FormatError : public Error {
public:
    enum class Code {
        io,
        bad_magic,
        version_mismatch,
        bad_header,
        truncated,
        non_monotonic_sweep,
        crc_mismatch,
    };

    FormatError(Code code, std::string msg)
        : Error(ErrorCategory::format, std::move(msg)), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

// Inputs that are structurally fine but violate a documented precondition
// (inadmissible parameters, dimension mismatches, model/quantity mixups).
class ValidationError : public Error {
public:
    explicit ValidationError(std::string msg)
        : Error(ErrorCategory::validation, std::move(msg)) {}
};

// A pipeline stage that cannot produce a result (failed global fit,
// unresolvable spectrum).
class ProcessingError : public Error {
public:
    explicit ProcessingError(std::string msg)
        : Error(ErrorCategory::processing, std::move(msg)) {}
};

// Resonance-group search found the wrong number of groups; carries the
// count so callers may re-run with a smaller expectation.
class PeakCountError : public ProcessingError {
public:
    PeakCountError(int found, int expected, std::string msg)
        : ProcessingError(std::move(msg)), found_(found), expected_(expected) {}
    int found() const noexcept { return found_; }
    int expected() const noexcept { return expected_; }

private:
    int found_;
    int expected_;
};

} // namespace qdm
