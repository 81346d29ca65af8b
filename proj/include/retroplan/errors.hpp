#pragma once
// Error types shared across the library.

#include <stdexcept>
#include <string>

namespace retroplan {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input / data errors
struct MissingFile : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct DanglingReference : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// Numeric / algorithmic errors
struct DomainError : Error { using Error::Error; };
struct DegenerateCluster : Error { using Error::Error; };
struct IterationLimit : Error { using Error::Error; };
struct NumericalBreakdown : Error { using Error::Error; };
struct MissingVariable : Error { using Error::Error; };

inline SchemaError schema_error(const std::string& file, long row, const std::string& column,
                                const std::string& reason) {
    return SchemaError(file + ":" + std::to_string(row) + ": column '" + column + "': " + reason);
}

}  // namespace retroplan
