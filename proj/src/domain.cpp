#include "dgakit/domain.hpp"

#include "dgakit/util.hpp"

namespace dgakit {

std::string_view to_string(DomainError e) {
    switch (e) {
        case DomainError::kTooShort: return "too_short";
        case DomainError::kNoDot: return "no_dot";
        case DomainError::kBadChar: return "bad_char";
    }
    return "unknown";
}

std::variant<DomainName, DomainRejection> normalize(std::string_view input) {
    std::string lower = to_lower(input);

    if (lower.size() < kMinDomainLength)
        return DomainRejection{DomainError::kTooShort, std::to_string(lower.size()) + " chars"};

    if (lower.find('.') == std::string::npos)
        return DomainRejection{DomainError::kNoDot, ""};

    for (char c : lower) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
        if (!ok) return DomainRejection{DomainError::kBadChar, std::string(1, c)};
    }

    auto labels = split(lower, '.');
    for (const auto& l : labels)
        if (l.empty()) return DomainRejection{DomainError::kBadChar, "empty label"};

    DomainName d;
    d.raw = std::string(input);
    d.normalized = std::move(lower);
    d.sld = labels[labels.size() - 2];
    d.tld = labels.back();
    d.labels = std::move(labels);
    return d;
}

DomainName strip_subdomains(const DomainName& d) {
    if (d.labels.size() <= 2) return d;
    DomainName out;
    out.raw = d.raw;
    out.sld = d.sld;
    out.tld = d.tld;
    out.normalized = d.sld + "." + d.tld;
    out.labels = {d.sld, d.tld};
    return out;
}

EncodedDomain encode(const DomainName& d) {
    EncodedDomain e;
    const std::string& s = d.normalized;
    e.length = s.size() < kEncodedLength ? s.size() : kEncodedLength;
    for (std::size_t i = 0; i < e.length; ++i) e.codes[i] = char_code(s[i]);
    return e;
}

std::string decode(const EncodedDomain& e) {
    std::string out;
    out.reserve(e.length);
    for (std::size_t i = 0; i < e.length && e.codes[i] != 0; ++i)
        out.push_back(kCharTable[e.codes[i] - 1]);
    return out;
}

}  // namespace dgakit
