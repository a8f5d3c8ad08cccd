#pragma once

#include <stdexcept>
#include <string>

namespace fairpost {

// Bad arguments, malformed configs, violated preconditions. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Missing files, malformed data, numerical failure. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairpost
