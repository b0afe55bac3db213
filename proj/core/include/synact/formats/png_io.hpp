#pragma once

#include "synact/formats/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace synact {

// 8-bit RGB PNG encode/decode. Decoding accepts gray, gray+alpha, palette
// and RGBA images and converts to RGB8 (alpha dropped, 16-bit reduced).
std::vector<std::uint8_t> encode_png(const Texture& image);
Texture decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Texture& image);
Texture read_png(const std::filesystem::path& path);

// 16-bit grayscale PNG (used for depth maps in millimeters).
std::vector<std::uint8_t> encode_png_gray16(int width, int height, std::span<const std::uint16_t> values);
std::vector<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes, int& width, int& height);

// Whole-file helpers used by every loader.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_text(const std::filesystem::path& path, std::string_view text);

}  // namespace synact
