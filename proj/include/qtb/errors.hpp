#pragma once

#include <stdexcept>
#include <string>

namespace qtb {

// invalid configuration: bad spec keys or values, unknown decoder names,
// malformed grids (CLI exit code 2)
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// an analysis produced or received no usable rows (CLI exit code 3)
class EmptyDataError : public std::runtime_error {
public:
    explicit EmptyDataError(const std::string& what) : std::runtime_error(what) {}
};

// guided decoder requested without a resolvable guide table; escalated to a
// failure only under --strict (CLI exit code 4)
class GuideMissingError : public std::runtime_error {
public:
    explicit GuideMissingError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qtb
