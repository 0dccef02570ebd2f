#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lrsched {

// Big-endian IDX containers (images magic 2051, labels magic 2049).
struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, const IdxImages& images);
void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels);

}  // namespace lrsched
