#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "dgakit/regex_tools.hpp"
#include "dgakit/registry.hpp"

using namespace dgakit;

namespace {

DomainName dn(std::string_view s) {
    auto r = normalize(s);
    REQUIRE(std::holds_alternative<DomainName>(r));
    return strip_subdomains(std::get<DomainName>(r));
}

std::vector<DomainName> dns(const std::vector<std::string>& names) {
    std::vector<DomainName> out;
    for (const auto& n : names) out.push_back(dn(n));
    return out;
}

FamilyRegistry tiny_registry() {
    std::vector<FamilyLabel> labels;
    labels.push_back({"alpha", true, 5.0, FamilyRegex::make("abcdefghijklmnopqrstuvwxyz", 8, 12, {"com", "net"})});
    labels.push_back({"beta", false, 5.0, FamilyRegex::make("abcdefghijklmnopqrstuvwxyz0123456789", 4, 20, {"org"})});
    labels.push_back({"benign", true, 5.0, FamilyRegex::make_catch_all()});
    return FamilyRegistry::make(std::move(labels));
}

}  // namespace

TEST_CASE("pattern render is canonical") {
    auto r = FamilyRegex::make("abcdefghijklmnopqrstuvwxy12345", 22, 26, {"net", "com"});
    CHECK(r.render() == "[1-5a-y]{22,26}\\.(com|net)$");

    auto fixed = FamilyRegex::make("az19", 12, 12, {"com"});
    CHECK(fixed.render() == "[19az]{12}\\.(com)$");

    auto hyphen = FamilyRegex::make("abc-", 4, 6, {"io"});
    CHECK(hyphen.render() == "[a-c-]{4,6}\\.(io)$");

    CHECK(FamilyRegex::make_catch_all().render() == ".*");
}

TEST_CASE("pattern parse round trips") {
    const char* patterns[] = {
        "[1-5a-y]{22,26}\\.(com|net)$",
        "[19az]{12}\\.(com)$",
        "[a-c-]{4,6}\\.(io)$",
        "[0-9a-z]{4,22}\\.(com|net|org)$",
        ".*",
    };
    for (const char* p : patterns) {
        CAPTURE(p);
        auto r = FamilyRegex::parse(p);
        REQUIRE(r.has_value());
        CHECK(r->render() == p);
    }
}

TEST_CASE("pattern parse rejects malformed input") {
    const char* bad[] = {
        "",        "[a-z]",           "[a-z]{4}",          "[a-z]{4}\\.(com)",
        "[]{4}\\.(com)$",             "[a-z]{0}\\.(com)$", "[a-z]{9,4}\\.(com)$",
        "[a-z]{4}\\.()$",             "[a-z]{4}\\.(com|)$", "[A-Z]{4}\\.(com)$",
        "[a-z]{x}\\.(com)$",          "[a-z]{4}\\.(com)$x", "[z-a]{4}\\.(com)$",
    };
    for (const char* p : bad) {
        CAPTURE(p);
        CHECK(!FamilyRegex::parse(p).has_value());
    }
}

TEST_CASE("pattern matching checks length charset and tld") {
    auto r = FamilyRegex::make("abcdefghijklmnopqrstuvwxyz", 8, 12, {"com", "net"});
    CHECK(r.matches(dn("abcdefgh.com")));
    CHECK(r.matches(dn("abcdefghijkl.net")));
    CHECK(!r.matches(dn("abcdefg.com")));        // too short
    CHECK(!r.matches(dn("abcdefghijklm.com")));  // too long
    CHECK(!r.matches(dn("abcdefg1.com")));       // digit not in class
    CHECK(!r.matches(dn("abcdefgh.org")));       // wrong tld
    CHECK(FamilyRegex::make_catch_all().matches(dn("x0--y.anything")));
}

TEST_CASE("registry construction is validated") {
    CHECK_THROWS(FamilyRegistry::make({}));

    std::vector<FamilyLabel> no_benign;
    no_benign.push_back({"a", true, 5.0, FamilyRegex::make("ab", 4, 8, {"com"})});
    CHECK_THROWS(FamilyRegistry::make(std::move(no_benign)));

    std::vector<FamilyLabel> two_benign;
    two_benign.push_back({"a", true, 5.0, FamilyRegex::make_catch_all()});
    two_benign.push_back({"b", true, 5.0, FamilyRegex::make_catch_all()});
    CHECK_THROWS(FamilyRegistry::make(std::move(two_benign)));

    std::vector<FamilyLabel> dup;
    dup.push_back({"a", true, 5.0, FamilyRegex::make("ab", 4, 8, {"com"})});
    dup.push_back({"a", true, 5.0, FamilyRegex::make_catch_all()});
    CHECK_THROWS(FamilyRegistry::make(std::move(dup)));

    auto reg = tiny_registry();
    CHECK(reg.size() == 3);
    CHECK(reg.benign_index() == 2);
    CHECK(reg.index_of("beta") == 1);
    CHECK(!reg.index_of("nope").has_value());
}

TEST_CASE("registry tsv round trip") {
    auto reg = tiny_registry();
    auto path = std::filesystem::temp_directory_path() / "dgakit_reg_test.tsv";
    reg.save_tsv(path.string());
    auto back = FamilyRegistry::load_tsv(path.string());
    REQUIRE(back.size() == reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i) {
        CHECK(back.at(i).name == reg.at(i).name);
        CHECK(back.at(i).deterministic == reg.at(i).deterministic);
        CHECK(back.at(i).threshold == reg.at(i).threshold);
        CHECK(back.at(i).regex.render() == reg.at(i).regex.render());
    }
    CHECK(back.benign_index() == 2);
    std::filesystem::remove(path);

    CHECK_THROWS(FamilyRegistry::load_tsv("/nonexistent/registry.tsv"));
}

TEST_CASE("majority vote breaks ties toward the lowest index") {
    auto reg = tiny_registry();
    CHECK(reg.majority({0, 0, 1}) == 0);
    CHECK(reg.majority({1, 1, 0}) == 1);
    CHECK(reg.majority({0, 1}) == 0);        // tie
    CHECK(reg.majority({2, 1, 1, 2}) == 1);  // tie between 1 and 2
    CHECK(reg.majority({}) == reg.benign_index());
}

TEST_CASE("regex extraction summarizes a batch") {
    auto got = extract_regex(dns({"abcdefgh.com", "ijklmnop.com", "qrstuvwx.net"}));
    REQUIRE(std::holds_alternative<FamilyRegex>(got));
    const auto& r = std::get<FamilyRegex>(got);
    CHECK(r.min_len == 8);
    CHECK(r.max_len == 8);
    CHECK(r.tlds == std::vector<std::string>{"com", "net"});
    CHECK(r.render() == "[a-x]{8}\\.(com|net)$");

    CHECK(std::holds_alternative<ExtractError>(extract_regex({})));
}

TEST_CASE("regex extraction drops rare lengths below five percent of modal") {
    // 96 names of length 10, 4 of length 20: 4 < 0.05 * 96 so the long ones go
    std::vector<std::string> names;
    for (int i = 0; i < 96; ++i) names.push_back("aaaaaaaa" + std::string(1, 'a' + i % 25) + "a.com");
    for (int i = 0; i < 4; ++i) names.push_back(std::string(20, 'z') + ".net");
    auto got = extract_regex(dns(names));
    REQUIRE(std::holds_alternative<FamilyRegex>(got));
    const auto& r = std::get<FamilyRegex>(got);
    CHECK(r.min_len == 10);
    CHECK(r.max_len == 10);
    CHECK(r.tlds == std::vector<std::string>{"com"});
    CHECK(!r.allows('z'));

    // exactly at the cutoff survives: 5 is not strictly below 0.05 * 100
    std::vector<std::string> boundary;
    for (int i = 0; i < 100; ++i) boundary.push_back("aaaaaaaaaa.com");
    for (int i = 0; i < 5; ++i) boundary.push_back(std::string(20, 'z') + ".net");
    auto got2 = extract_regex(dns(boundary));
    REQUIRE(std::holds_alternative<FamilyRegex>(got2));
    CHECK(std::get<FamilyRegex>(got2).max_len == 20);
}

TEST_CASE("regex agreement compares extracted against family envelopes") {
    auto family = FamilyRegex::make("abcdefghijklmnopqrstuvwxyz", 8, 12, {"com", "net"});

    auto inside = extract_regex(dns({"abcdefgh.com", "abcdefghij.net"}));
    auto a = regex_agreement(std::get<FamilyRegex>(inside), family);
    CHECK(a.charclass_subset);
    CHECK(a.length_within);
    CHECK(a.tlds_subset);
    CHECK(a.all());

    auto outside = extract_regex(dns({"abc1efgh.org", "abcdefghijklmn.org"}));
    auto b = regex_agreement(std::get<FamilyRegex>(outside), family);
    CHECK(!b.charclass_subset);  // digit
    CHECK(!b.length_within);     // 14 > 12
    CHECK(!b.tlds_subset);       // org
    CHECK(!b.all());

    auto c = regex_agreement(std::get<FamilyRegex>(outside), FamilyRegex::make_catch_all());
    CHECK(c.all());
}

TEST_CASE("matcher keeps a matching top prediction") {
    auto reg = tiny_registry();
    std::set<std::size_t> discarded;
    auto r = matcher_pick({0.8, 0.1, 0.1}, dn("abcdefgh.com"), reg, discarded);
    CHECK(r.label == 0);
    CHECK(!r.regex_changed);
    CHECK(discarded.empty());
}

TEST_CASE("matcher demotes predictions whose pattern cannot match") {
    auto reg = tiny_registry();
    std::set<std::size_t> discarded;
    // alpha wins the argmax but the domain has a digit, so beta takes over
    auto r = matcher_pick({0.6, 0.3, 0.1}, dn("abc1efgh.org"), reg, discarded);
    CHECK(r.label == 1);
    CHECK(r.regex_changed);
    CHECK(discarded == std::set<std::size_t>{0});

    // nothing but the catch-all matches a short name ending in .io
    auto r2 = matcher_pick({0.6, 0.3, 0.1}, dn("ab-0.io"), reg, discarded);
    CHECK(r2.label == reg.benign_index());
    CHECK(r2.regex_changed);
    CHECK(discarded == std::set<std::size_t>{0, 1});
}

TEST_CASE("matcher breaks probability ties toward the lower index") {
    auto reg = tiny_registry();
    std::set<std::size_t> discarded;
    auto r = matcher_pick({0.4, 0.4, 0.2}, dn("abcdefgh.com"), reg, discarded);
    CHECK(r.label == 0);
    CHECK(!r.regex_changed);
}
