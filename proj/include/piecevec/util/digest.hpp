#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "../errors.hpp"

namespace piecevec {

// FNV-1a 64-bit. Manifests only need a stable content fingerprint for
// change detection, not a cryptographic digest.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for digest: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return h;
}

inline std::string digest_hex(std::uint64_t h) {
    static const char* hexd = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hexd[h & 0xF];
        h >>= 4;
    }
    return s;
}

}  // namespace piecevec
