#pragma once

// Domain name validation, e2LD stripping and the fixed-width integer
// encoding consumed by the classifier.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dgakit {

// Alphabet of encodable characters. Code = index + 1; 0 is padding.
inline constexpr std::string_view kCharTable = "abcdefghijklmnopqrstuvwxyz0123456789-.";
inline constexpr std::size_t kAlphabetSize = kCharTable.size();  // 38
inline constexpr std::size_t kEncodedLength = 59;
inline constexpr std::size_t kMinDomainLength = 4;

// 1..38 for known characters, 0 for anything else.
inline std::uint8_t char_code(char c) {
    if (c >= 'a' && c <= 'z') return static_cast<std::uint8_t>(c - 'a' + 1);
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0' + 27);
    if (c == '-') return 37;
    if (c == '.') return 38;
    return 0;
}

enum class DomainError {
    kTooShort,
    kNoDot,
    kBadChar,
};

std::string_view to_string(DomainError e);

struct DomainRejection {
    DomainError error;
    std::string detail;  // offending character or a short note
};

struct DomainName {
    std::string raw;         // input as received
    std::string normalized;  // lowercased, validated
    std::vector<std::string> labels;
    std::string sld;  // second-to-last label
    std::string tld;  // last label
};

// Lowercases and validates. Rejections are checked in a fixed order:
// length first, then missing dot, then characters outside [a-z0-9.-]
// (which covers empty labels, whitespace and all punctuation).
std::variant<DomainName, DomainRejection> normalize(std::string_view input);

// Keeps the last two labels. Already-two-label names pass through.
DomainName strip_subdomains(const DomainName& d);

struct EncodedDomain {
    std::array<std::uint8_t, kEncodedLength> codes{};  // zero padded
    std::size_t length = 0;                            // pre-truncation length capped at 59
};

EncodedDomain encode(const DomainName& d);
std::string decode(const EncodedDomain& e);

}  // namespace dgakit
