#pragma once

#include <stdexcept>
#include <string>

namespace sonic {

inline constexpr const char* kToolVersion = "0.1.0";

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input file / serialized data.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sonic
