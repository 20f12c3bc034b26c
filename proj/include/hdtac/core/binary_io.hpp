#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "hdtac/core/errors.hpp"

namespace hdtac::io {

// Little-endian encoding independent of host byte order.

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    const U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
    out.write(buf.data(), buf.size());
}

template <typename T>
T read_le(std::istream& in) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    std::array<unsigned char, sizeof(T)> buf{};
    if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw IngestError("unexpected end of binary file");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    const auto n = read_le<std::uint16_t>(in);
    std::string s(n, '\0');
    if (n && !in.read(s.data(), n)) throw IngestError("unexpected end of binary file");
    return s;
}

inline void write_magic(std::ostream& out, const char (&magic)[9]) { out.write(magic, 8); }

inline void expect_magic(std::istream& in, const char (&magic)[9], const std::string& what) {
    char buf[8]{};
    if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0) throw IngestError(what + ": bad magic");
}

}  // namespace hdtac::io
