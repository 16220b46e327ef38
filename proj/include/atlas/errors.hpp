#ifndef ATLAS_ERRORS_HPP
#define ATLAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace atlas {

// Exit codes: 1 config, 2 data, 3 numeric.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace atlas

#endif // ATLAS_ERRORS_HPP
