#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <unistd.h>

namespace testutil {

// All binaries land in one directory; locate siblings relative to ourselves.
inline std::filesystem::path bin_dir() {
    return std::filesystem::read_symlink("/proc/self/exe").parent_path();
}

inline std::string tool(const std::string& name) {
    auto p = bin_dir() / name;
    if (!std::filesystem::exists(p))
        throw std::runtime_error("missing tool binary: " + p.string());
    return p.string();
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 100; ++i) {
            auto cand = base / ("extchan-test-" + std::to_string(::getpid()) + "-" +
                                std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(cand, ec)) {
                path_ = cand;
                return;
            }
        }
        throw std::runtime_error("cannot create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testutil
