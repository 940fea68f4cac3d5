#include "specamp/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "specamp/csv.hpp"

namespace specamp {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string checksum_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunManifest::set(const std::string& key, const std::string& value) {
    for (auto& e : entries_) {
        if (e.first == key) {
            e.second = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void RunManifest::set_double(const std::string& key, double value) {
    set(key, format_double(value));
}

const std::string* RunManifest::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.first == key) return &e.second;
    return nullptr;
}

void RunManifest::add_file(const std::string& run_dir, const std::string& rel_path) {
    set("file." + rel_path, checksum_hex(fnv1a64_file(run_dir + "/" + rel_path)));
}

std::vector<std::string> RunManifest::files() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.first.rfind("file.", 0) == 0) out.push_back(e.first.substr(5));
    return out;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot write " + path);
    for (const auto& e : entries_) out << e.first << " = " << e.second << '\n';
}

RunManifest RunManifest::read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path);
    RunManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto sep = line.find(" = ");
        if (sep == std::string::npos)
            throw std::runtime_error("manifest: malformed line '" + line + "'");
        m.entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
    }
    return m;
}

std::vector<std::string> RunManifest::verify(const std::string& dir) const {
    std::vector<std::string> bad;
    for (const auto& e : entries_) {
        if (e.first.rfind("file.", 0) != 0) continue;
        const std::string rel = e.first.substr(5);
        try {
            if (checksum_hex(fnv1a64_file(dir + "/" + rel)) != e.second)
                bad.push_back(rel);
        } catch (const std::exception&) {
            bad.push_back(rel);
        }
    }
    return bad;
}

}  // namespace specamp
