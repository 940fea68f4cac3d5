#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace specamp {

// FNV-1a 64-bit over a byte stream; used for output integrity checks.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);
std::string checksum_hex(std::uint64_t h);

// Ordered key = value document describing one finished run: resolved
// configuration, derived quantities, and a checksum per emitted file.
// Re-running the recorded configuration must reproduce every checksummed
// file byte for byte.
class RunManifest {
  public:
    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    const std::string* find(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    // register an output file (path relative to the run directory)
    void add_file(const std::string& run_dir, const std::string& rel_path);
    std::vector<std::string> files() const;

    void write(const std::string& path) const;
    static RunManifest read(const std::string& path);

    // checks recorded checksums against the files in dir; returns the
    // relative paths that mismatch or are missing
    std::vector<std::string> verify(const std::string& dir) const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace specamp
