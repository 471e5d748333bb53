#pragma once

#include <stdexcept>
#include <string>

namespace vlogcues {

/// Precondition violated by the caller (empty list, mismatched lengths, bad range).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A file could be opened but its content is not acceptable (bad row, bad header).
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Diarization kept no window, so no descriptors can be computed.
class NoSpeechRetained : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DecodeErrorKind { MissingFile, UnsupportedFormat, Truncated, Malformed };

class DecodeError : public std::runtime_error {
public:
    DecodeError(DecodeErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    DecodeErrorKind kind() const noexcept { return kind_; }

private:
    DecodeErrorKind kind_;
};

}  // namespace vlogcues
