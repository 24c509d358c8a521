#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "specklesim/grid.hpp"

namespace specklesim {

// FNV-1a 64-bit hash, used for artifact fingerprints in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::filesystem::path& file);

// Canonical image format: raw little-endian float32 (<base>.f32) plus a text
// sidecar (<base>.txt) with dims, pitch and semantic role. Bit-exactness
// guarantees apply to the .f32 payload.
void write_image_f32(const std::filesystem::path& base, const Image& img,
                     const std::string& role);
Image read_image_f32(const std::filesystem::path& base);

// Human-viewable preview: 16-bit binary PGM (P5), max-normalized,
// big-endian sample order per the format.
void write_pgm16(const std::filesystem::path& file, const Image& img);

// Stack storage: <prefix>_<0000>.f32 one file per frame plus
// <prefix>_stack.txt manifest.
void write_stack(const std::filesystem::path& dir, const ImageStack& stack,
                 const std::string& prefix);
ImageStack read_stack(const std::filesystem::path& dir, const std::string& prefix);

void write_text_file(const std::filesystem::path& file, const std::string& text);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace specklesim
