#include "cfrom/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cfrom/errors.hpp"

namespace cfrom::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint64_t to_little_endian(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::little) {
        return bits;
    } else {
        std::uint64_t out = 0;
        for (int b = 0; b < 8; ++b) {
            out = (out << 8) | ((bits >> (8 * b)) & 0xffU);
        }
        return out;
    }
}

}  // namespace

void Header::set(const std::string& key, const std::string& value) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const auto& kv) { return kv.first == key; });
    if (it != entries_.end()) {
        it->second = value;
    } else {
        entries_.emplace_back(key, value);
    }
}

void Header::set(const std::string& key, double value) { set(key, format_double(value)); }

void Header::set(const std::string& key, long value) { set(key, std::to_string(value)); }

bool Header::contains(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

const std::string& Header::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw IoError("missing header key '" + key + "'");
}

double Header::get_double(const std::string& key) const {
    const std::string& text = get(key);
    double v = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || first == ptr) {
        throw IoError("key '" + key + "' is not a number: '" + text + "'");
    }
    return v;
}

long Header::get_long(const std::string& key) const {
    const std::string& text = get(key);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw IoError("key '" + key + "' is not an integer: '" + text + "'");
    }
    return v;
}

Header parse_key_values(const std::string& text, const std::string& origin) {
    Header header;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw IoError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        header.set(key, value);
    }
    return header;
}

Header read_header(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str(), path.string());
}

void write_header(const std::filesystem::path& path, const Header& header) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& [k, v] : header.entries()) {
        out << k << " = " << v << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void write_f64(const std::filesystem::path& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    std::vector<std::uint64_t> words(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        words[i] = to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
    }
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)));
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<double> read_f64(const std::filesystem::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(double)) {
        throw IoError(path.string() + ": expected " + std::to_string(count) +
                      " float64 values, file holds " + std::to_string(bytes) + " bytes");
    }
    in.seekg(0);
    std::vector<std::uint64_t> words(count);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("read failed for " + path.string());
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = std::bit_cast<double>(to_little_endian(words[i]));
    }
    return values;
}

std::filesystem::path header_path(const std::filesystem::path& base) {
    auto p = base;
    p += ".hdr";
    return p;
}

std::filesystem::path data_path(const std::filesystem::path& base) {
    auto p = base;
    p += ".bin";
    return p;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace cfrom::io
