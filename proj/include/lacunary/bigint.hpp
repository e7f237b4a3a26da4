#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstddef>
#include <string>

namespace lacunary {

// Exact arithmetic backbone: GMP integers and rationals.
using Int = mpz_class;
using Rat = mpq_class;

inline Int pow2(unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

// Number of bits in |v|; bit_length(0) == 0.
inline long bit_length(const Int& v) {
    if (v == 0) return 0;
    return static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

inline bool is_power_of_two(const Int& v) {
    return v > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

// Exponent e with v == 2^e; caller must ensure is_power_of_two(v).
inline long power_of_two_exponent(const Int& v) {
    return static_cast<long>(mpz_scan1(v.get_mpz_t(), 0));
}

// FNV-1a over the limb array (plus sign and size), for unordered containers
// keyed by exact integers.
struct IntHash {
    std::size_t operator()(const Int& v) const noexcept {
        const mpz_srcptr z = v.get_mpz_t();
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t w) {
            h ^= w;
            h *= 1099511628211ULL;
        };
        const int sz = z->_mp_size;
        mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(sz)));
        const int n = sz < 0 ? -sz : sz;
        for (int i = 0; i < n; ++i)
            mix(static_cast<std::uint64_t>(mpz_getlimbn(z, i)));
        return static_cast<std::size_t>(h);
    }
};

inline std::string to_decimal(const Int& v) { return v.get_str(10); }

}  // namespace lacunary
