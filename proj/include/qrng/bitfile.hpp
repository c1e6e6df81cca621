#pragma once

// Bit file formats.
//
// Binary (all integers little-endian):
//   offset 0   8 bytes  magic "QRNGBITS"
//   offset 8   u16      format version (1)
//   offset 10  u64      bit length
//   offset 18  u32      provenance text length L
//   offset 22  L bytes  provenance text (see Provenance::to_text)
//   then       ceil(bit length / 8) bytes of MSB-first packed bits
//
// ASCII: the characters '0' and '1'; whitespace is ignored on input.

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "qrng/errors.hpp"
#include "qrng/postproc.hpp"

namespace qrng::bitfile {

inline constexpr std::array<char, 8> kMagic{'Q', 'R', 'N', 'G', 'B', 'I', 'T', 'S'};
inline constexpr std::uint16_t kVersion = 1;

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
    if (offset + sizeof(T) > in.size()) {
        throw FormatError("bit file truncated in header");
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return static_cast<T>(value);
}

inline std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error while reading '" + path.string() + "'");
    }
    return data;
}

inline void write_all(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw IoError("error while writing '" + path.string() + "'");
    }
}

}  // namespace detail

inline std::string encode_binary(const postproc::BitStream& bits) {
    const std::string provenance = bits.provenance().to_text();
    std::string out(kMagic.begin(), kMagic.end());
    detail::put_le<std::uint16_t>(out, kVersion);
    detail::put_le<std::uint64_t>(out, bits.size());
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(provenance.size()));
    out += provenance;
    out.append(reinterpret_cast<const char*>(bits.packed().data()), bits.packed().size());
    return out;
}

inline bool has_binary_magic(const std::string& data) {
    return data.size() >= kMagic.size() && std::memcmp(data.data(), kMagic.data(), kMagic.size()) == 0;
}

inline postproc::BitStream decode_binary(const std::string& data) {
    if (!has_binary_magic(data)) {
        throw FormatError("missing bit file magic");
    }
    const auto version = detail::get_le<std::uint16_t>(data, 8);
    if (version != kVersion) {
        throw FormatError("unsupported bit file version " + std::to_string(version));
    }
    const auto length = detail::get_le<std::uint64_t>(data, 10);
    const auto prov_len = detail::get_le<std::uint32_t>(data, 18);
    const std::size_t payload = 22 + static_cast<std::size_t>(prov_len);
    if (payload > data.size()) {
        throw FormatError("bit file truncated in provenance");
    }
    const std::size_t nbytes = static_cast<std::size_t>((length + 7) / 8);
    if (data.size() - payload != nbytes) {
        throw FormatError("bit file payload size does not match its declared bit length");
    }
    std::vector<std::uint8_t> packed(data.begin() + static_cast<std::ptrdiff_t>(payload), data.end());
    return postproc::BitStream::from_packed(std::move(packed), static_cast<std::size_t>(length),
                                            postproc::Provenance::from_text(data.substr(22, prov_len)));
}

inline postproc::BitStream decode_ascii(const std::string& data) {
    postproc::BitStream bits;
    bits.reserve(data.size());
    for (char c : data) {
        if (c == '0' || c == '1') {
            bits.push_back(c == '1');
        } else if (c != ' ' && c != '\n' && c != '\r' && c != '\t') {
            throw FormatError("unrecognised bit file: expected binary header or ASCII '0'/'1'");
        }
    }
    return bits;
}

inline void write_binary(const std::filesystem::path& path, const postproc::BitStream& bits) {
    detail::write_all(path, encode_binary(bits));
}

inline void write_ascii(const std::filesystem::path& path, const postproc::BitStream& bits) {
    detail::write_all(path, bits.to_string());
}

/// Reads either format, chosen by the presence of the binary magic.
inline postproc::BitStream read(const std::filesystem::path& path) {
    const std::string data = detail::read_all(path);
    return has_binary_magic(data) ? decode_binary(data) : decode_ascii(data);
}

}  // namespace qrng::bitfile
