#pragma once

#include <stdexcept>
#include <string>

namespace minbrain {

// All recoverable failures carry a stable machine-readable code next to the
// human-readable message. Codes are listed with the operations that raise
// them; the CLI maps them onto exit status 1 payloads.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace minbrain
