#pragma once

#include <docroute/corpus.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

/// Self-cleaning scratch directory under the system temp path.
class TempDir {
public:
    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        auto pid = static_cast<std::uint64_t>(::getpid());
        path_ = std::filesystem::temp_directory_path() /
                ("docroute_test_" + std::to_string(pid) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        if (path_.empty())
            return;
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    TempDir(TempDir&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

inline docroute::Chunk make_chunk(std::uint32_t chunk_id, std::uint32_t doc_id,
                                  const std::string& text) {
    docroute::Chunk c;
    c.chunk_id = chunk_id;
    c.doc_id = doc_id;
    c.seq = chunk_id;
    c.start = 0;
    c.end = text.size();
    c.text = text;
    return c;
}

inline std::vector<float> unit_vector(std::vector<float> v) {
    double norm = 0.0;
    for (float x : v)
        norm += static_cast<double>(x) * static_cast<double>(x);
    norm = std::sqrt(norm);
    for (float& x : v)
        x = static_cast<float>(x / norm);
    return v;
}

inline std::vector<float> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<float> v(dim);
    for (;;) {
        double norm = 0.0;
        for (auto& x : v) {
            x = static_cast<float>(normal(rng));
            norm += static_cast<double>(x) * static_cast<double>(x);
        }
        if (norm > 1e-12) {
            norm = std::sqrt(norm);
            for (auto& x : v)
                x = static_cast<float>(x / norm);
            return v;
        }
    }
}

inline std::string random_text(std::mt19937_64& rng, std::size_t length) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz 0123456789";
    std::string s(length, 'a');
    for (auto& c : s)
        c = alphabet[rng() % (sizeof(alphabet) - 1)];
    return s;
}

} // namespace testsupport
