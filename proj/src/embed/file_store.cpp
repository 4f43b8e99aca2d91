#include "infodensity/embed/file_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "infodensity/error.hpp"

namespace infodensity::embed {

namespace {

static_assert(std::endian::native == std::endian::little,
              "store I/O assumes a little-endian host");

template <typename T>
void put_le(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw ValidationError(fmt::format("{}: truncated embedding store", path.string()));
    return v;
}

} // namespace

void FileStore::put(const std::string& id, std::vector<float> v) {
    if (dim == 0) dim = static_cast<std::uint32_t>(v.size());
    if (v.size() != dim)
        throw ValidationError(fmt::format("store entry '{}' has dim {} (store dim {})", id, v.size(), dim));
    if (vectors.find(id) == vectors.end()) ids.push_back(id);
    vectors[id] = std::move(v);
}

FileStore FileStore::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot open embedding store {}", path.string()));
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw ValidationError(fmt::format("{}: not an embedding store (bad magic)", path.string()));
    FileStore store;
    store.dim = get_le<std::uint32_t>(in, path);
    const auto count = get_le<std::uint64_t>(in, path);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = get_le<std::uint32_t>(in, path);
        std::string id(len, '\0');
        if (!in.read(id.data(), len))
            throw ValidationError(fmt::format("{}: truncated embedding store", path.string()));
        std::vector<float> v(store.dim);
        if (!in.read(reinterpret_cast<char*>(v.data()),
                     static_cast<std::streamsize>(v.size() * sizeof(float))))
            throw ValidationError(fmt::format("{}: truncated embedding store", path.string()));
        store.put(id, std::move(v));
    }
    return store;
}

void FileStore::write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out.write(kMagic, 8);
        put_le<std::uint32_t>(out, dim);
        put_le<std::uint64_t>(out, ids.size());
        for (const auto& id : ids) {
            put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
            out.write(id.data(), static_cast<std::streamsize>(id.size()));
            const auto& v = vectors.at(id);
            out.write(reinterpret_cast<const char*>(v.data()),
                      static_cast<std::streamsize>(v.size() * sizeof(float)));
        }
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace infodensity::embed
