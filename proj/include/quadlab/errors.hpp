#pragma once

#include <stdexcept>
#include <string>

namespace quadlab {

// Invalid parameter or malformed config/cache input. CLI maps this to exit 1.
// Messages always name the offending key so callers can report it verbatim.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A computation would exceed a declared budget (memory, feasibility range,
// quadrature cutoff). CLI maps this to exit 2.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The characteristic function failed to decay below the required floor within
// the allowed tau range; a density inversion started this way would be garbage.
class cutoff_error : public resource_error {
public:
    explicit cutoff_error(const std::string& msg) : resource_error(msg) {}
};

// Filesystem failure (open/read/write). CLI maps this to exit 3.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace quadlab
