#pragma once

#include <stdexcept>
#include <string>

namespace basketlab {

// Error categories map onto the CLI exit codes: 1 usage/config, 2 data, 3 internal.
enum class ErrorKind { Usage = 1, Data = 2, Internal = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

    static Error usage(const std::string& msg) { return {ErrorKind::Usage, msg}; }
    static Error data(const std::string& msg) { return {ErrorKind::Data, msg}; }
    static Error internal(const std::string& msg) { return {ErrorKind::Internal, msg}; }

private:
    ErrorKind kind_;
};

} // namespace basketlab
