#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nids/error.hpp"

namespace nids {

std::uint64_t fnv1a64(std::span<const std::byte> bytes);

// Little-endian binary buffer builder used by every persisted format.
class ByteWriter {
  public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<std::byte>(v)); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f32(float v);
    void f64(double v);
    void raw(std::span<const std::byte> bytes);
    void str(const std::string &s); // u64 length + bytes

    std::span<const std::byte> bytes() const { return buf_; }
    std::vector<std::byte> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }
    void patch_u64(std::size_t offset, std::uint64_t v);

  private:
    std::vector<std::byte> buf_;
};

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32();
    double f64();
    std::string str();
    std::span<const std::byte> raw(std::size_t n);
    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size())
            throw FormatError("truncated file");
    }
    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::byte> read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::span<const std::byte> bytes);

// Standard container layout shared by the persisted formats:
//   8-byte magic | u32 version | u64 fnv1a64(body) | body
std::vector<std::byte> wrap_container(const char magic[8], std::uint32_t version,
                                      std::span<const std::byte> body);
// Verifies magic/version/checksum and returns the body.
std::span<const std::byte> unwrap_container(std::span<const std::byte> file, const char magic[8],
                                            std::uint32_t expect_version);

} // namespace nids
