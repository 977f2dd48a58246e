#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ppr {

// Thrown for invalid inputs and model violations. `code` is a stable
// machine-readable tag (e.g. "self_loop", "not_laminar"); `what()` carries
// the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace ppr
