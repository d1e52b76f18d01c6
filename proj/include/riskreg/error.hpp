#pragma once

#include <stdexcept>
#include <string>

namespace riskreg {

// Validation errors map to CLI exit status 2, numeric failures to 3.
enum class ErrorKind { Validation, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& module() const { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

[[noreturn]] inline void fail_validation(const char* module, const std::string& message) {
    throw Error(ErrorKind::Validation, module, message);
}

[[noreturn]] inline void fail_numeric(const char* module, const std::string& message) {
    throw Error(ErrorKind::Numeric, module, message);
}

}  // namespace riskreg
