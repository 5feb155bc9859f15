#pragma once

#include <stdexcept>
#include <string>

namespace legalir {

enum class ErrorKind {
    kInvalidArgument,
    kIo,
    kParse,
    kValidation,
    kRange,
    kDomain,
    kTransport,
    kBuild,
};

/// Base exception for every failure raised by the engine. The kind maps
/// one-to-one onto the status codes of the C API.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error io_error(const std::string& path, const std::string& msg) {
    return Error(ErrorKind::kIo, path + ": " + msg);
}

}  // namespace legalir
