#include "dgakit/zoo.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "dgakit/domain.hpp"

namespace dgakit {

namespace {

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kLettersDigits = "abcdefghijklmnopqrstuvwxyz0123456789";

const std::uint64_t* get_u64(const SeedSet& s, const std::string& key) {
    auto it = s.find(key);
    if (it == s.end()) return nullptr;
    return std::get_if<std::uint64_t>(&it->second);
}

const std::string* get_str(const SeedSet& s, const std::string& key) {
    auto it = s.find(key);
    if (it == s.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
}

void require_valid(const DgaFamily& f, const SeedSet& seeds) {
    if (auto err = f.validate(seeds))
        throw std::invalid_argument(std::string(f.name()) + ": " + *err);
}

// Pulls unique strings out of a generator closure. Gives up once the
// attempt budget runs dry so degenerate seeds cannot loop forever.
template <typename Fn>
std::vector<std::string> unique_stream(std::size_t count, Fn next) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::size_t attempts = 0;
    const std::size_t cap = count * 20 + 64;
    while (out.size() < count && attempts < cap) {
        ++attempts;
        std::string d = next();
        if (seen.insert(d).second) out.push_back(std::move(d));
    }
    return out;
}

bool all_letters(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string random_letters(Rng& rng, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(kLetters[rng.bounded(26)]);
    return s;
}

// Shuffles the letters of a fixed base string per domain.
class PermDga final : public DgaFamily {
public:
    std::string_view name() const override { return "permdga"; }
    bool deterministic() const override { return true; }
    bool date_dependent() const override { return false; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"base", true, 0, 0, "8 to 24 lowercase letters"},
                {"tld", true, 0, 0, "com or net"}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLetters, 8, 24, {"com", "net"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        auto base = get_str(seeds, "base");
        auto tld = get_str(seeds, "tld");
        if (!base) return "missing string field base";
        if (!tld) return "missing string field tld";
        if (base->size() < 8 || base->size() > 24) return "base must be 8 to 24 chars";
        if (!all_letters(*base)) return "base must be lowercase letters";
        if (*tld != "com" && *tld != "net") return "tld must be com or net";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate&,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        const std::string& base = *get_str(seeds, "base");
        const std::string& tld = *get_str(seeds, "tld");
        Rng rng(fnv1a64(base + "." + tld));
        std::vector<char> chars(base.begin(), base.end());
        return unique_stream(count, [&] {
            rng.shuffle(chars);
            return std::string(chars.begin(), chars.end()) + "." + tld;
        });
    }

    SeedSet sample_seed(Rng& rng) const override {
        std::size_t len = 8 + rng.bounded(17);
        if (len == 12) len = 13;  // keep clear of the fixed-width family's shape
        return {{"base", random_letters(rng, len)},
                {"tld", std::string(rng.bounded(2) ? "net" : "com")}};
    }

    std::vector<SeedSet> known_campaigns() const override {
        static const std::vector<std::pair<std::string_view, std::string_view>> bases = {
            {"getadobeflashplayer", "net"}, {"windowsupdateservice", "com"},
            {"lifeisgoodtoday", "com"},     {"securemailgateway", "net"},
            {"cloudsyncmanager", "com"},    {"antivirusscanner", "net"},
            {"mediaplayerhub", "com"},      {"fastdownloader", "net"},
            {"systemhealthcheck", "com"},   {"networkmonitor", "net"},
            {"backupstorage", "com"},       {"proxyserverfarm", "net"},
            {"digitalcertstore", "com"},
        };
        std::vector<SeedSet> out;
        for (const auto& [b, t] : bases)
            out.push_back({{"base", std::string(b)}, {"tld", std::string(t)}});
        return out;
    }

    SeedSet canonicalize(const SeedSet& seeds) const override {
        SeedSet out = seeds;
        if (auto base = get_str(seeds, "base")) {
            std::string sorted = *base;
            std::sort(sorted.begin(), sorted.end());
            out["base"] = sorted;
        }
        return out;
    }
};

// Appends a running decimal counter to a fixed stem.
class IterDga final : public DgaFamily {
public:
    std::string_view name() const override { return "iterdga"; }
    bool deterministic() const override { return true; }
    bool date_dependent() const override { return false; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"base", true, 0, 0, "3 to 12 chars [a-z0-9], last char a letter"},
                {"start", false, 0, 1000000, ""},
                {"tld", true, 0, 0, "com, net or org"}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLettersDigits, 4, 22, {"com", "net", "org"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        auto base = get_str(seeds, "base");
        auto start = get_u64(seeds, "start");
        auto tld = get_str(seeds, "tld");
        if (!base) return "missing string field base";
        if (!start) return "missing integer field start";
        if (!tld) return "missing string field tld";
        if (base->size() < 3 || base->size() > 12) return "base must be 3 to 12 chars";
        for (char c : *base)
            if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')))
                return "base must be [a-z0-9]";
        if (base->back() >= '0' && base->back() <= '9')
            return "base must end in a letter";
        if (*start > 1000000) return "start must be at most 1000000";
        if (*tld != "com" && *tld != "net" && *tld != "org") return "tld must be com, net or org";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate&,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        const std::string& base = *get_str(seeds, "base");
        const std::string& tld = *get_str(seeds, "tld");
        std::uint64_t start = *get_u64(seeds, "start");
        std::vector<std::string> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(base + std::to_string(start + i) + "." + tld);
        return out;
    }

    SeedSet sample_seed(Rng& rng) const override {
        static const char* tlds[] = {"com", "net", "org"};
        return {{"base", random_letters(rng, 4 + rng.bounded(7))},
                {"start", rng.bounded(100000)},
                {"tld", std::string(tlds[rng.bounded(3)])}};
    }

    std::vector<SeedSet> known_campaigns() const override {
        struct Row {
            std::string_view base;
            std::uint64_t start;
            std::string_view tld;
        };
        static const std::vector<Row> rows = {
            {"ns1dnsfor", 0, "com"},  {"updsvc", 100, "net"},    {"cdnnode", 1, "com"},
            {"mailrelay", 500, "org"}, {"syncpoint", 42, "net"}, {"apigate", 1000, "com"},
            {"logcollect", 7, "org"}, {"statsfeed", 250, "net"}, {"pushnotify", 33, "com"},
            {"timeserver", 900, "org"}, {"authcheck", 12, "net"}, {"datavault", 777, "com"},
            {"webcache", 3000, "org"},
        };
        std::vector<SeedSet> out;
        for (const auto& r : rows)
            out.push_back({{"base", std::string(r.base)},
                           {"start", r.start},
                           {"tld", std::string(r.tld)}});
        return out;
    }
};

// Linear congruential stream reseeded from the calendar date.
class LcgDga final : public DgaFamily {
public:
    std::string_view name() const override { return "lcgdga"; }
    bool deterministic() const override { return true; }
    bool date_dependent() const override { return true; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"seed", false, 0, kLcgSeedSpace - 1, ""},
                {"tld", true, 0, 0, "com or net"}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLetters, 12, 12, {"com", "net"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        auto seed = get_u64(seeds, "seed");
        auto tld = get_str(seeds, "tld");
        if (!seed) return "missing integer field seed";
        if (!tld) return "missing string field tld";
        if (*seed >= kLcgSeedSpace) return "seed must fit in 16 bits";
        if (*tld != "com" && *tld != "net") return "tld must be com or net";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate& date,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        const std::string& tld = *get_str(seeds, "tld");
        std::uint32_t state = initial_state(*get_u64(seeds, "seed"), date);
        return unique_stream(count, [&] {
            std::string sld;
            for (int i = 0; i < 12; ++i) {
                state = step(state);
                sld.push_back(static_cast<char>('a' + (state >> 16) % 26));
            }
            return sld + "." + tld;
        });
    }

    SeedSet sample_seed(Rng& rng) const override {
        return {{"seed", rng.bounded(kLcgSeedSpace)},
                {"tld", std::string(rng.bounded(2) ? "net" : "com")}};
    }

    std::vector<SeedSet> known_campaigns() const override {
        static const std::uint64_t seeds[] = {0x1234, 0xBEEF, 0x0001, 0x00FF, 0x0F0F,
                                              0x1000, 0x2468, 0x3141, 0x5555, 0x7FFF,
                                              0x8000, 0xABCD, 0xFFFE};
        std::vector<SeedSet> out;
        for (std::size_t i = 0; i < 13; ++i)
            out.push_back({{"seed", seeds[i]}, {"tld", std::string(i % 2 ? "net" : "com")}});
        return out;
    }

    static std::uint32_t initial_state(std::uint64_t seed, const CivilDate& date) {
        return (static_cast<std::uint32_t>(seed) ^ (date_key(date) * 2654435761u)) & 0x7fffffffu;
    }

    static std::uint32_t step(std::uint32_t state) {
        return static_cast<std::uint32_t>((1103515245ULL * state + 12345ULL) & 0x7fffffffULL);
    }
};

// xorshift stream keyed by a residue class; raw seeds collapse mod 31373.
class ModDga final : public DgaFamily {
public:
    std::string_view name() const override { return "moddga"; }
    bool deterministic() const override { return true; }
    bool date_dependent() const override { return false; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"seed", false, 0, ~0ULL, "equivalent modulo 31373"}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLetters, 14, 14, {"biz", "info"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        if (!get_u64(seeds, "seed")) return "missing integer field seed";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate&,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        std::uint32_t x = initial_state(*get_u64(seeds, "seed"));
        return unique_stream(count, [&] {
            std::string sld;
            for (int i = 0; i < 14; ++i) {
                x = xorshift(x);
                sld.push_back(static_cast<char>('a' + (x >> 8) % 26));
            }
            x = xorshift(x);
            return sld + ((x & 1) ? ".biz" : ".info");
        });
    }

    SeedSet sample_seed(Rng& rng) const override {
        return {{"seed", rng.bounded(1ULL << 32)}};
    }

    std::vector<SeedSet> known_campaigns() const override {
        static const std::uint64_t seeds[] = {100000, 1,     42,    777,   3141,  5000, 9999,
                                              12345,  15000, 20220, 25000, 29999, 31000};
        std::vector<SeedSet> out;
        for (auto s : seeds) out.push_back({{"seed", s}});
        return out;
    }

    SeedSet canonicalize(const SeedSet& seeds) const override {
        SeedSet out = seeds;
        if (auto s = get_u64(seeds, "seed")) out["seed"] = *s % kModDgaModulus;
        return out;
    }

    static std::uint32_t initial_state(std::uint64_t seed) {
        std::uint32_t x = static_cast<std::uint32_t>((seed % kModDgaModulus) * 2654435761ULL +
                                                     0x9e3779b9ULL);
        return x ? x : 0x9e3779b9u;
    }

    static std::uint32_t xorshift(std::uint32_t x) {
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        return x;
    }
};

// Concatenates word pairs from a fixed table, walking an index window.
class WordDga final : public DgaFamily {
public:
    static constexpr std::uint64_t kIndexSpace = kWordsPerList * kWordsPerList;  // 16384

    std::string_view name() const override { return "worddga"; }
    bool deterministic() const override { return true; }
    bool date_dependent() const override { return false; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"list", false, 0, kWordListCount - 1, ""},
                {"start", false, 0, kIndexSpace - 1, ""}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLetters, 6, 16, {"net", "org"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        auto list = get_u64(seeds, "list");
        auto start = get_u64(seeds, "start");
        if (!list) return "missing integer field list";
        if (!start) return "missing integer field start";
        if (*list >= kWordListCount) return "list must be 0 to 2";
        if (*start >= kIndexSpace) return "start must be below 16384";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate&,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        const auto& words = word_lists()[*get_u64(seeds, "list")];
        std::uint64_t start = *get_u64(seeds, "start");
        std::vector<std::string> out;
        std::size_t n = std::min<std::size_t>(count, kIndexSpace);
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t k = (start + i) % kIndexSpace;
            std::string sld = std::string(words[k % kWordsPerList]) +
                              std::string(words[(k / kWordsPerList) % kWordsPerList]);
            out.push_back(sld + ((k % 2) ? ".org" : ".net"));
        }
        return out;
    }

    SeedSet sample_seed(Rng& rng) const override {
        return {{"list", rng.bounded(kWordListCount)},
                {"start", rng.bounded(kIndexSpace - 256)}};
    }

    std::vector<SeedSet> known_campaigns() const override {
        std::vector<SeedSet> out;
        for (std::uint64_t list = 0; list < 2; ++list) {
            for (std::uint64_t start = 0; start < 7 * 2048; start += 2048) {
                if (out.size() == 13) break;
                out.push_back({{"list", list}, {"start", start}});
            }
        }
        return out;
    }
};

// Seeded from a tick counter the malware reads at run time; two executions
// never share a seed, so catalogued domains rarely cover a live run.
class TicksDga final : public DgaFamily {
public:
    std::string_view name() const override { return "ticksdga"; }
    bool deterministic() const override { return false; }
    bool date_dependent() const override { return false; }

    std::vector<SeedFieldSpec> seed_schema() const override {
        return {{"ticks", false, 0, ~0ULL, ""}};
    }

    FamilyRegex family_regex() const override {
        return FamilyRegex::make(kLettersDigits, 10, 10, {"top"});
    }

    std::optional<std::string> validate(const SeedSet& seeds) const override {
        if (!get_u64(seeds, "ticks")) return "missing integer field ticks";
        return std::nullopt;
    }

    std::vector<std::string> generate(const SeedSet& seeds, const CivilDate&,
                                      std::size_t count) const override {
        require_valid(*this, seeds);
        Rng rng(*get_u64(seeds, "ticks") ^ fnv1a64("ticksdga"));
        return unique_stream(count, [&] {
            std::string sld;
            for (int i = 0; i < 10; ++i) sld.push_back(kLettersDigits[rng.bounded(36)]);
            return sld + ".top";
        });
    }

    SeedSet sample_seed(Rng& rng) const override { return {{"ticks", rng.next()}}; }

    std::vector<SeedSet> known_campaigns() const override { return {}; }
};

}  // namespace

std::string seed_to_string(const SeedSet& seeds) {
    std::string out;
    for (const auto& [key, value] : seeds) {
        if (!out.empty()) out.push_back(',');
        out += key;
        out.push_back('=');
        if (auto* u = std::get_if<std::uint64_t>(&value))
            out += std::to_string(*u);
        else
            out += std::get<std::string>(value);
    }
    return out;
}

const std::vector<std::unique_ptr<DgaFamily>>& all_families() {
    static const auto families = [] {
        std::vector<std::unique_ptr<DgaFamily>> v;
        v.push_back(std::make_unique<PermDga>());
        v.push_back(std::make_unique<IterDga>());
        v.push_back(std::make_unique<LcgDga>());
        v.push_back(std::make_unique<ModDga>());
        v.push_back(std::make_unique<WordDga>());
        v.push_back(std::make_unique<TicksDga>());
        return v;
    }();
    return families;
}

const DgaFamily* find_family(std::string_view name) {
    for (const auto& f : all_families())
        if (f->name() == name) return f.get();
    return nullptr;
}

FamilyRegistry default_registry() {
    std::vector<FamilyLabel> labels;
    for (const auto& f : all_families())
        labels.push_back({std::string(f->name()), f->deterministic(), 5.0, f->family_regex()});
    labels.push_back({"benign", true, 5.0, FamilyRegex::make_catch_all()});
    return FamilyRegistry::make(std::move(labels));
}

}  // namespace dgakit
