#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace infodensity::embed {

/// Precomputed embedding store.
///
/// Layout (all integers little-endian):
///   magic   8 bytes  "IDEMBED1"
///   dim     u32
///   count   u64
///   count records of: id_len u32, id bytes (UTF-8), dim x float32
///
/// Text entries use ids "text:<exact text>", images "image:<image ref>".
struct FileStore {
    static constexpr char kMagic[9] = "IDEMBED1";

    std::uint32_t dim = 0;
    std::vector<std::string> ids;   // file order
    std::unordered_map<std::string, std::vector<float>> vectors;

    void put(const std::string& id, std::vector<float> v);

    static FileStore read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

} // namespace infodensity::embed
