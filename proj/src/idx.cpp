#include "lrsched/idx.hpp"

#include <fstream>

#include "lrsched/errors.hpp"

namespace lrsched {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::uint32_t read_u32_be(std::istream& f, std::size_t& offset) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (!f) throw FormatError("IDX: truncated header", offset);
    offset += 4;
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& f, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("IDX: cannot open " + path.string());
    std::size_t off = 0;
    const std::uint32_t magic = read_u32_be(f, off);
    if (magic != kImageMagic)
        throw FormatError("IDX: bad image magic " + std::to_string(magic) + " in " +
                              path.string(),
                          0);
    IdxImages out;
    out.count = read_u32_be(f, off);
    out.rows = read_u32_be(f, off);
    out.cols = read_u32_be(f, off);
    const std::size_t n = out.count * out.rows * out.cols;
    out.pixels.resize(n);
    f.read(reinterpret_cast<char*>(out.pixels.data()),
           static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(f.gcount()) != n)
        throw FormatError("IDX: truncated pixel data in " + path.string(),
                          off + static_cast<std::size_t>(f.gcount()));
    return out;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("IDX: cannot open " + path.string());
    std::size_t off = 0;
    const std::uint32_t magic = read_u32_be(f, off);
    if (magic != kLabelMagic)
        throw FormatError("IDX: bad label magic " + std::to_string(magic) + " in " +
                              path.string(),
                          0);
    const std::uint32_t n = read_u32_be(f, off);
    std::vector<std::uint8_t> out(n);
    f.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(f.gcount()) != n)
        throw FormatError("IDX: truncated label data in " + path.string(),
                          off + static_cast<std::size_t>(f.gcount()));
    return out;
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images) {
    if (images.pixels.size() != images.count * images.rows * images.cols)
        throw ContractError("IDX: pixel buffer disagrees with the declared dimensions");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("IDX: cannot open " + path.string() + " for writing");
    write_u32_be(f, kImageMagic);
    write_u32_be(f, static_cast<std::uint32_t>(images.count));
    write_u32_be(f, static_cast<std::uint32_t>(images.rows));
    write_u32_be(f, static_cast<std::uint32_t>(images.cols));
    f.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
    if (!f) throw Error("IDX: write failed for " + path.string());
}

void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("IDX: cannot open " + path.string() + " for writing");
    write_u32_be(f, kLabelMagic);
    write_u32_be(f, static_cast<std::uint32_t>(labels.size()));
    f.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
    if (!f) throw Error("IDX: write failed for " + path.string());
}

}  // namespace lrsched
