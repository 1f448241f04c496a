#pragma once

// Header + record file convention shared by snapshots, bases, operators and
// closure models:
//   <base>.hdr  plain text, one `key = value` per line, `#` comments allowed
//   <base>.bin  IEEE-754 float64, little-endian, records stored back to back

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cfrom::io {

class Header {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long value);
    void set(const std::string& key, int value) { set(key, static_cast<long>(value)); }

    bool contains(const std::string& key) const;
    /// Throws IoError when the key is missing.
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;

    /// Keys in insertion order.
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
/// Malformed lines throw with the line number attached.
Header parse_key_values(const std::string& text, const std::string& origin);

Header read_header(const std::filesystem::path& path);
void write_header(const std::filesystem::path& path, const Header& header);

void write_f64(const std::filesystem::path& path, std::span<const double> values);
/// Reads exactly `count` doubles; a size mismatch throws IoError.
std::vector<double> read_f64(const std::filesystem::path& path, std::size_t count);

std::filesystem::path header_path(const std::filesystem::path& base);
std::filesystem::path data_path(const std::filesystem::path& base);

/// Shortest decimal form that round-trips a double.
std::string format_double(double value);

}  // namespace cfrom::io
