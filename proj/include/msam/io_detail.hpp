#pragma once

#include <stdexcept>
#include <string>

namespace msam {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Writes content to a temp file next to `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace detail
}  // namespace msam
