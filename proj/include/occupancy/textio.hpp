#pragma once

// Small text helpers shared by the CSV, sidecar and model-file readers.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace occupancy {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split_fields(std::string_view s, char sep);

/// Whole-string parse; nullopt on trailing garbage or non-finite results.
std::optional<double> parse_double(std::string_view s) noexcept;

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

/// "%.<decimals>f" formatting.
std::string format_fixed(double v, int decimals);

/// `key=value` lines; blank lines and lines starting with '#' are skipped.
class KeyValues {
public:
    void set(std::string key, std::string value);
    bool contains(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

KeyValues read_key_values(std::istream& in);

/// Writes to a sibling temporary file and renames over `path`, so readers
/// never observe a truncated file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace occupancy
