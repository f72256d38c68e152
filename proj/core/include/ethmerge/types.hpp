// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ethmerge {

//! Arbitrary-precision non-negative wei amount (or wei-per-gas price).
using Wei = boost::multiprecision::cpp_int;

inline constexpr uint64_t kWeiPerGwei = 1'000'000'000;

//! Parses an unsigned decimal string ("123") into Wei. Returns nullopt on any non-digit.
std::optional<Wei> parse_decimal_wei(std::string_view text);

//! Parses a JSON-RPC hex quantity ("0x1a") into Wei.
std::optional<Wei> parse_hex_wei(std::string_view text);

std::optional<uint64_t> parse_decimal_u64(std::string_view text);
std::optional<uint64_t> parse_hex_u64(std::string_view text);

std::string to_decimal(const Wei& value);

//! Wei converted to gwei as a double (rounded to nearest).
double to_gwei(const Wei& value);

std::string to_hex_quantity(uint64_t value);

//! Shortest decimal text that parses back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double value);
//! Inverse of format_double. Rejects trailing garbage.
std::optional<double> parse_double(std::string_view text);

template <std::size_t N>
class FixedBytes {
  public:
    FixedBytes() = default;
    explicit FixedBytes(const std::array<uint8_t, N>& bytes) : bytes_(bytes) {}

    //! Accepts "0x"-prefixed or bare hex of exactly 2N digits.
    static std::optional<FixedBytes> from_hex(std::string_view text);

    [[nodiscard]] std::string to_hex() const;
    [[nodiscard]] const std::array<uint8_t, N>& bytes() const noexcept { return bytes_; }
    [[nodiscard]] std::array<uint8_t, N>& bytes() noexcept { return bytes_; }

    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

  private:
    std::array<uint8_t, N> bytes_{};
};

using Hash32 = FixedBytes<32>;
using Address = FixedBytes<20>;

namespace detail {
    int hex_digit(char c) noexcept;
}

template <std::size_t N>
std::optional<FixedBytes<N>> FixedBytes<N>::from_hex(std::string_view text) {
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
    }
    if (text.size() != 2 * N) {
        return std::nullopt;
    }
    FixedBytes out;
    for (std::size_t i = 0; i < N; ++i) {
        const int hi = detail::hex_digit(text[2 * i]);
        const int lo = detail::hex_digit(text[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out.bytes_[i] = static_cast<uint8_t>(hi * 16 + lo);
    }
    return out;
}

template <std::size_t N>
std::string FixedBytes<N>::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + 2 * N);
    for (const uint8_t b : bytes_) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

}  // namespace ethmerge
