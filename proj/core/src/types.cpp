// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/types.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace ethmerge {

namespace detail {
    int hex_digit(char c) noexcept {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }
}  // namespace detail

std::optional<Wei> parse_decimal_wei(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    Wei value = 0;
    for (const char c : text) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

std::optional<Wei> parse_hex_wei(std::string_view text) {
    if (!(text.starts_with("0x") || text.starts_with("0X"))) {
        return std::nullopt;
    }
    text.remove_prefix(2);
    if (text.empty()) {
        return std::nullopt;
    }
    Wei value = 0;
    for (const char c : text) {
        const int d = detail::hex_digit(c);
        if (d < 0) {
            return std::nullopt;
        }
        value = (value << 4) + d;
    }
    return value;
}

namespace {
    std::optional<uint64_t> narrow(const std::optional<Wei>& wide) {
        if (!wide || *wide > std::numeric_limits<uint64_t>::max()) {
            return std::nullopt;
        }
        return wide->convert_to<uint64_t>();
    }
}  // namespace

std::optional<uint64_t> parse_decimal_u64(std::string_view text) { return narrow(parse_decimal_wei(text)); }

std::optional<uint64_t> parse_hex_u64(std::string_view text) { return narrow(parse_hex_wei(text)); }

std::string to_decimal(const Wei& value) { return value.str(); }

double to_gwei(const Wei& value) {
    const Wei whole = value / kWeiPerGwei;
    const Wei rest = value % kWeiPerGwei;
    return whole.convert_to<double>() + rest.convert_to<double>() / static_cast<double>(kWeiPerGwei);
}

std::string to_hex_quantity(uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    if (value == 0) {
        return "0x0";
    }
    std::string digits;
    while (value != 0) {
        digits.insert(digits.begin(), kDigits[value & 0x0f]);
        value >>= 4;
    }
    return "0x" + digits;
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
    if (text == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (text == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (text == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

}  // namespace ethmerge
