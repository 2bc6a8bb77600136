#pragma once

#include <stdexcept>
#include <string>

namespace iopea {

// Every failure carries a short machine-readable code ("empty-trajectory",
// "poset-too-large", ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Bad user input (config files, CLI flags). The CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail) : Error("config", detail) {}
};

} // namespace iopea
