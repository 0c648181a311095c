#pragma once

#include <stdexcept>
#include <string>

namespace capprice {

/// Malformed or inconsistent input data. Carries the file, line and field
/// that triggered the failure so loaders can report precisely.
class InputError : public std::runtime_error {
public:
    InputError(std::string file, int line, std::string field, const std::string& message)
        : std::runtime_error(format(file, line, field, message)),
          file_(std::move(file)),
          line_(line),
          field_(std::move(field)) {}

    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& file, int line, const std::string& field,
                              const std::string& message) {
        std::string out = file.empty() ? std::string("<input>") : file;
        if (line > 0) out += ":" + std::to_string(line);
        if (!field.empty()) out += " [" + field + "]";
        return out + ": " + message;
    }

    std::string file_;
    int line_;
    std::string field_;
};

/// Numerical trouble inside a solver (singular basis, lost feasibility).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dual values handed to the payment identity do not match the primal point.
class StaleDualsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace capprice
