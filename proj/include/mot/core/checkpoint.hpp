#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mot/core/tensor.hpp"

namespace mot::core {

/// Versioned parameter container: a manifest of named float32 tensors plus
/// integer metadata, followed by the raw little-endian value buffers.
/// Round-trips byte-exactly.
struct Checkpoint {
    std::map<std::string, Tensor> tensors;
    std::map<std::string, std::int64_t> meta;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    bool has(const std::string& name) const { return tensors.count(name) != 0; }

    const Tensor& get(const std::string& name) const;
    std::int64_t meta_or(const std::string& key, std::int64_t fallback) const;
};

} // namespace mot::core
