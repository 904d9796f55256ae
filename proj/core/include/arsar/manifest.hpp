#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace arsar {

/// Plain-text `key = value` store. Lines starting with `#` are comments.
/// Keys are written back in sorted order so output is byte-stable.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in);
    static KeyValueFile load(const std::string& path);

    void save(const std::string& path, const std::string& header_comment = {}) const;
    void write(std::ostream& out, const std::string& header_comment = {}) const;

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value) { entries_[key] = std::to_string(value); }
    void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

}  // namespace arsar
