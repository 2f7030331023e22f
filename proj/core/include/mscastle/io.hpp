#ifndef MSCASTLE_IO_HPP_
#define MSCASTLE_IO_HPP_

#include <filesystem>
#include <string>

namespace mscastle {

// Writes content to a temporary file in the target directory, then renames
// it over the destination, so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Formats a double with enough digits to round-trip exactly.
std::string format_double(double value);

}  // namespace mscastle

#endif  // MSCASTLE_IO_HPP_
