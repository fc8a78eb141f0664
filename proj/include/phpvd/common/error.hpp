// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phpvd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An error tied to a position in PHP source text.
class SourceError : public Error {
public:
    SourceError(const std::string& what, std::size_t line, std::size_t col)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line_(line), col_(col) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

class LexError : public SourceError {
public:
    using SourceError::SourceError;
};

class ParseError : public SourceError {
public:
    using SourceError::SourceError;
};

#define PHPVD_DEFINE_ERROR(Name)        \
    class Name : public Error {         \
    public:                             \
        using Error::Error;             \
    }

PHPVD_DEFINE_ERROR(EmptyCorpus);
PHPVD_DEFINE_ERROR(EmptyUnit);
PHPVD_DEFINE_ERROR(ManifestMismatch);
PHPVD_DEFINE_ERROR(GitError);
PHPVD_DEFINE_ERROR(ClassTooSmall);
PHPVD_DEFINE_ERROR(ShapeMismatch);
PHPVD_DEFINE_ERROR(IdOutOfRange);
PHPVD_DEFINE_ERROR(EmptyGraph);
PHPVD_DEFINE_ERROR(ConfigMismatch);
PHPVD_DEFINE_ERROR(LengthMismatch);
PHPVD_DEFINE_ERROR(MissingCheckpoint);
PHPVD_DEFINE_ERROR(CheckpointFormatError);
PHPVD_DEFINE_ERROR(IoError);
PHPVD_DEFINE_ERROR(FormatError);
PHPVD_DEFINE_ERROR(DivergenceDetected);

#undef PHPVD_DEFINE_ERROR

}  // namespace phpvd
