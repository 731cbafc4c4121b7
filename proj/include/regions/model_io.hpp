#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "regions/network.hpp"
#include "regions/tensor.hpp"

namespace regions {

inline constexpr int kManifestVersion = 1;
inline constexpr std::uint32_t kTensorVersion = 1;

/// Reads `<name>.manifest.json` + `<name>.weights.bin`.
///
/// Parameters are the blob bytes reinterpreted as little-endian f64, with no
/// conversion. Throws FormatError for version mismatches, out-of-range,
/// overlapping or misaligned slices, non-finite weights and unsupported layer
/// kinds, naming the offending layer index.
Network load_model(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& blob_path);

/// Writes a model readable by load_model with bit-equal parameters.
/// Networks without layers are rejected.
void save_model(const Network& net, const std::filesystem::path& manifest_path,
                const std::filesystem::path& blob_path);

/// RTEN container:
///   "RTEN" | u32 version | u8 dtype (0 = f64) | u8 ndim | u64 dims[ndim] | f64 payload
/// All integers and values little-endian, payload row-major.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);

}  // namespace regions
