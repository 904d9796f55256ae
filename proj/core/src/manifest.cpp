#include "arsar/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "arsar/error.hpp"

namespace arsar {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

KeyValueFile KeyValueFile::parse(std::istream& in) {
    KeyValueFile kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("key-value line " + std::to_string(lineno) + ": missing '='");
        }
        auto key = trim(t.substr(0, eq));
        if (key.empty()) throw InvalidArgument("key-value line " + std::to_string(lineno) + ": empty key");
        kv.entries_[key] = trim(t.substr(eq + 1));
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse(in);
}

void KeyValueFile::write(std::ostream& out, const std::string& header_comment) const {
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

void KeyValueFile::save(const std::string& path, const std::string& header_comment) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    write(out, header_comment);
    if (!out) throw IoError("write failed: " + path);
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) const {
    auto v = get(key);
    if (!v) throw InvalidArgument("missing key '" + key + "'");
    return *v;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double KeyValueFile::get_double(const std::string& key) const {
    const auto s = get_string(key);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InvalidArgument("key '" + key + "': not a number: " + s);
    }
    return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    return contains(key) ? get_double(key) : fallback;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key) const {
    const auto s = get_string(key);
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InvalidArgument("key '" + key + "': not an unsigned integer: " + s);
    }
    return v;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
    return contains(key) ? get_u64(key) : fallback;
}

void KeyValueFile::set(const std::string& key, double value) { entries_[key] = format_double(value); }

}  // namespace arsar
