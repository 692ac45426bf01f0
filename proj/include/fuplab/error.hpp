#pragma once
#include <stdexcept>
#include <string>

namespace fuplab {

// Domain error with a stable machine-readable code ("precondition-violated",
// "resolution-too-coarse", ...) plus a human explanation.  The CLI maps codes
// onto exit statuses, tests match on them.
class FupError : public std::runtime_error {
public:
    FupError(std::string code, const std::string& what_arg)
        : std::runtime_error(code + ": " + what_arg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Config/usage error: bad field values, unreadable files.  Exit status 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what_arg)
        : std::runtime_error("config error [" + field + "]: " + what_arg),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

} // namespace fuplab
