#include "mot/core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mot/core/binio.hpp"

namespace mot::core {

using namespace binio;

namespace {
constexpr char kMagic[8] = {'M', 'O', 'T', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF32 = 0;
} // namespace

void Checkpoint::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put_u32(os, kVersion);

    put_u32(os, static_cast<std::uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        put_str(os, k);
        put_i64(os, v);
    }

    put_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put_str(os, name);
        put_u32(os, kDtypeF32);
        put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
        for (int e : t.shape) put_u32(os, static_cast<std::uint32_t>(e));
    }
    for (const auto& [name, t] : tensors) {
        (void)name;
        for (float x : t.v) put_f32(os, x);
    }
    if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    const std::uint32_t version = get_u32(is);
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }

    Checkpoint ck;
    const std::uint32_t meta_count = get_u32(is);
    for (std::uint32_t i = 0; i < meta_count; ++i) {
        std::string k = get_str(is);
        ck.meta[k] = get_i64(is);
    }

    const std::uint32_t tensor_count = get_u32(is);
    std::vector<std::pair<std::string, std::vector<int>>> manifest;
    manifest.reserve(tensor_count);
    for (std::uint32_t i = 0; i < tensor_count; ++i) {
        std::string name = get_str(is);
        const std::uint32_t dtype = get_u32(is);
        if (dtype != kDtypeF32) throw std::runtime_error("checkpoint: unsupported dtype for " + name);
        const std::uint32_t ndim = get_u32(is);
        std::vector<int> shape(ndim);
        for (auto& e : shape) e = static_cast<int>(get_u32(is));
        manifest.emplace_back(std::move(name), std::move(shape));
    }
    for (auto& [name, shape] : manifest) {
        Tensor t(shape);
        for (auto& x : t.v) x = get_f32(is);
        ck.tensors.emplace(name, std::move(t));
    }
    return ck;
}

const Tensor& Checkpoint::get(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("checkpoint: missing tensor " + name);
    return it->second;
}

std::int64_t Checkpoint::meta_or(const std::string& key, std::int64_t fallback) const {
    auto it = meta.find(key);
    return it == meta.end() ? fallback : it->second;
}

} // namespace mot::core
