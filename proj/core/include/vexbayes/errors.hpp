#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vexbayes {

/// Library error carrying a short machine-readable code (e.g. "invalid-range")
/// alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void raise(std::string_view code, const std::string& message) {
    throw Error(std::string(code), message);
}

inline void require(bool condition, std::string_view code, const std::string& message) {
    if (!condition) raise(code, message);
}

}  // namespace vexbayes
