#include "nids/io_util.hpp"

#include <bit>
#include <fstream>

namespace nids {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms unsupported");

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

template <typename T> void put_le(std::vector<std::byte> &buf, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

template <typename T> T get_le(std::span<const std::byte> bytes) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(static_cast<std::uint8_t>(bytes[i])) << (8 * i);
    return v;
}

} // namespace

void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buf_, v); }

void ByteWriter::f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u32(bits);
}

void ByteWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
}

void ByteWriter::raw(std::span<const std::byte> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::str(const std::string &s) {
    u64(s.size());
    raw(std::as_bytes(std::span<const char>(s.data(), s.size())));
}

void ByteWriter::patch_u64(std::size_t offset, std::uint64_t v) {
    for (std::size_t i = 0; i < 8; ++i)
        buf_[offset + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

std::uint8_t ByteReader::u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
}

std::uint32_t ByteReader::u32() {
    need(4);
    auto v = get_le<std::uint32_t>(bytes_.subspan(pos_, 4));
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    auto v = get_le<std::uint64_t>(bytes_.subspan(pos_, 8));
    pos_ += 8;
    return v;
}

float ByteReader::f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

double ByteReader::f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string ByteReader::str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::span<const std::byte> ByteReader::raw(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
}

std::vector<std::byte> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(static_cast<std::size_t>(size));
    if (size > 0)
        in.read(reinterpret_cast<char *>(bytes.data()), size);
    if (!in)
        throw IoError("failed reading " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path &path, std::span<const std::byte> bytes) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::vector<std::byte> wrap_container(const char magic[8], std::uint32_t version,
                                      std::span<const std::byte> body) {
    ByteWriter w;
    w.raw(std::as_bytes(std::span<const char>(magic, 8)));
    w.u32(version);
    w.u64(fnv1a64(body));
    w.raw(body);
    return w.take();
}

std::span<const std::byte> unwrap_container(std::span<const std::byte> file, const char magic[8],
                                            std::uint32_t expect_version) {
    if (file.size() < 20)
        throw FormatError("file too short for container header");
    if (std::memcmp(file.data(), magic, 8) != 0)
        throw FormatError("bad magic: not a " + std::string(magic, 8) + " file");
    ByteReader r(file.subspan(8));
    const std::uint32_t version = r.u32();
    if (version != expect_version)
        throw FormatError("unsupported format version " + std::to_string(version));
    const std::uint64_t checksum = r.u64();
    auto body = file.subspan(20);
    if (fnv1a64(body) != checksum)
        throw FormatError("checksum mismatch: file is corrupted");
    return body;
}

} // namespace nids
