#include <doctest.h>

#include <algorithm>
#include <set>

#include "dgakit/zoo.hpp"

using namespace dgakit;

namespace {

const CivilDate kDate{2026, 8, 14};

DomainName dn(const std::string& s) {
    auto r = normalize(s);
    REQUIRE_MESSAGE(std::holds_alternative<DomainName>(r), "invalid domain: " << s);
    return strip_subdomains(std::get<DomainName>(r));
}

std::string sorted_copy(std::string s) {
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

TEST_CASE("zoo roster and registry") {
    const auto& fams = all_families();
    REQUIRE(fams.size() == 6);
    const char* names[] = {"permdga", "iterdga", "lcgdga", "moddga", "worddga", "ticksdga"};
    for (std::size_t i = 0; i < 6; ++i) CHECK(fams[i]->name() == names[i]);

    CHECK(find_family("moddga") == fams[3].get());
    CHECK(find_family("nope") == nullptr);

    auto reg = default_registry();
    REQUIRE(reg.size() == 7);
    CHECK(reg.benign_index() == 6);
    CHECK(reg.at(6).name == "benign");
    CHECK(reg.at(6).regex.catch_all);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(reg.at(i).name == names[i]);
        CHECK(reg.at(i).threshold == 5.0);
    }
    CHECK(reg.at(5).deterministic == false);  // ticksdga
    for (std::size_t i = 0; i < 5; ++i) CHECK(reg.at(i).deterministic);
}

TEST_CASE("every family generates unique in-envelope deterministic domains") {
    for (const auto& fam : all_families()) {
        CAPTURE(fam->name());
        auto regex = fam->family_regex();
        Rng rng(fnv1a64(fam->name()) ^ 0x5eed);

        std::vector<SeedSet> seeds = fam->known_campaigns();
        for (int i = 0; i < 10; ++i) seeds.push_back(fam->sample_seed(rng));

        for (const auto& seed : seeds) {
            CAPTURE(seed_to_string(seed));
            CHECK(!fam->validate(seed).has_value());

            auto domains = fam->generate(seed, kDate, 40);
            CHECK(domains.size() == 40);
            std::set<std::string> uniq(domains.begin(), domains.end());
            CHECK(uniq.size() == domains.size());
            for (const auto& d : domains) CHECK(regex.matches(dn(d)));

            // same inputs reproduce the list, shorter counts are prefixes
            CHECK(fam->generate(seed, kDate, 40) == domains);
            auto prefix = fam->generate(seed, kDate, 15);
            CHECK(std::equal(prefix.begin(), prefix.end(), domains.begin()));
        }
    }
}

TEST_CASE("every family has thirteen known campaigns except ticksdga") {
    for (const auto& fam : all_families()) {
        CAPTURE(fam->name());
        auto known = fam->known_campaigns();
        if (fam->name() == "ticksdga") {
            CHECK(known.empty());
            continue;
        }
        CHECK(known.size() == 13);
        // campaigns are distinct even after canonicalization
        std::set<std::string> canon;
        for (const auto& s : known) canon.insert(seed_to_string(fam->canonicalize(s)));
        CHECK(canon.size() == 13);
    }
}

TEST_CASE("generate rejects invalid seeds") {
    const auto* perm = find_family("permdga");
    CHECK_THROWS_AS(perm->generate({}, kDate, 5), std::invalid_argument);
    CHECK_THROWS_AS(perm->generate({{"base", std::string("short")}, {"tld", std::string("com")}},
                                   kDate, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(perm->generate({{"base", std::string("has4digit")}, {"tld", std::string("com")}},
                                   kDate, 5),
                    std::invalid_argument);

    const auto* iter = find_family("iterdga");
    CHECK(iter->validate({{"base", std::string("abc1")}, {"start", std::uint64_t{0}},
                          {"tld", std::string("com")}})
              .has_value());  // ends in a digit

    const auto* lcg = find_family("lcgdga");
    CHECK(lcg->validate({{"seed", std::uint64_t{70000}}, {"tld", std::string("com")}})
              .has_value());

    const auto* word = find_family("worddga");
    CHECK(word->validate({{"list", std::uint64_t{3}}, {"start", std::uint64_t{0}}}).has_value());
    CHECK(word->validate({{"list", std::uint64_t{0}}, {"start", std::uint64_t{16384}}})
              .has_value());
}

TEST_CASE("permutation family emits anagrams of its base") {
    const auto* fam = find_family("permdga");
    SeedSet seed{{"base", std::string("getadobeflashplayer")}, {"tld", std::string("net")}};
    auto domains = fam->generate(seed, kDate, 60);
    CHECK(domains.size() == 60);
    const std::string want = sorted_copy("getadobeflashplayer");
    for (const auto& d : domains) {
        auto name = dn(d);
        CHECK(sorted_copy(name.sld) == want);
        CHECK(name.tld == "net");
    }

    auto canon = fam->canonicalize(seed);
    CHECK(std::get<std::string>(canon.at("base")) == want);
    // canonical seed is itself valid and generates the same anagram class
    CHECK(!fam->validate(canon).has_value());
    auto from_canon = fam->generate(canon, kDate, 5);
    CHECK(sorted_copy(dn(from_canon[0]).sld) == want);
}

TEST_CASE("iterator family counts upward from its start") {
    const auto* fam = find_family("iterdga");
    SeedSet seed{{"base", std::string("ns1dnsfor")}, {"start", std::uint64_t{0}},
                 {"tld", std::string("com")}};
    CHECK(fam->generate(seed, kDate, 3) ==
          std::vector<std::string>{"ns1dnsfor0.com", "ns1dnsfor1.com", "ns1dnsfor2.com"});

    SeedSet other{{"base", std::string("updsvc")}, {"start", std::uint64_t{100}},
                  {"tld", std::string("net")}};
    CHECK(fam->generate(other, kDate, 2) ==
          std::vector<std::string>{"updsvc100.net", "updsvc101.net"});
}

TEST_CASE("date dependent family changes daily but only then") {
    const auto* fam = find_family("lcgdga");
    SeedSet seed{{"seed", std::uint64_t{0x1234}}, {"tld", std::string("com")}};
    auto today = fam->generate(seed, kDate, 20);
    auto tomorrow = fam->generate(seed, add_days(kDate, 1), 20);
    CHECK(today != tomorrow);
    CHECK(fam->generate(seed, kDate, 20) == today);

    SeedSet other{{"seed", std::uint64_t{0x1235}}, {"tld", std::string("com")}};
    CHECK(fam->generate(other, kDate, 20) != today);

    for (const auto& f : all_families()) {
        CAPTURE(f->name());
        CHECK(f->date_dependent() == (f->name() == "lcgdga"));
    }
}

TEST_CASE("residue family collapses seeds modulo 31373") {
    const auto* fam = find_family("moddga");
    SeedSet a{{"seed", std::uint64_t{100000}}};
    SeedSet b{{"seed", std::uint64_t{100000 + kModDgaModulus}}};
    SeedSet c{{"seed", std::uint64_t{5881}}};
    auto da = fam->generate(a, kDate, 30);
    CHECK(da == fam->generate(b, kDate, 30));
    CHECK(da == fam->generate(c, kDate, 30));  // 100000 mod 31373 == 5881
    CHECK(std::get<std::uint64_t>(fam->canonicalize(a).at("seed")) == 5881);

    SeedSet d{{"seed", std::uint64_t{5882}}};
    CHECK(fam->generate(d, kDate, 30) != da);
}

TEST_CASE("wordlist family concatenates table words") {
    const auto* fam = find_family("worddga");
    const auto& words = word_lists();

    SeedSet seed{{"list", std::uint64_t{0}}, {"start", std::uint64_t{0}}};
    auto domains = fam->generate(seed, kDate, 3);
    CHECK(domains[0] == std::string(words[0][0]) + std::string(words[0][0]) + ".net");
    CHECK(domains[1] == std::string(words[0][1]) + std::string(words[0][0]) + ".org");
    CHECK(domains[2] == std::string(words[0][2]) + std::string(words[0][0]) + ".net");

    // index walks the second word after 128 steps
    SeedSet far{{"list", std::uint64_t{1}}, {"start", std::uint64_t{128}}};
    auto d2 = fam->generate(far, kDate, 1);
    CHECK(d2[0] == std::string(words[1][0]) + std::string(words[1][1]) + ".net");
}

TEST_CASE("tick seeded family reproduces per seed and is marked non deterministic") {
    const auto* fam = find_family("ticksdga");
    CHECK(!fam->deterministic());
    SeedSet a{{"ticks", std::uint64_t{987654321}}};
    auto da = fam->generate(a, kDate, 25);
    CHECK(da == fam->generate(a, kDate, 25));
    SeedSet b{{"ticks", std::uint64_t{987654322}}};
    CHECK(fam->generate(b, kDate, 25) != da);
}

TEST_CASE("word tables are well formed") {
    const auto& lists = word_lists();
    std::set<std::string_view> all;
    for (const auto& list : lists) {
        for (auto w : list) {
            CAPTURE(w);
            CHECK(w.size() >= 3);
            CHECK(w.size() <= 8);
            for (char c : w) CHECK((c >= 'a' && c <= 'z'));
            CHECK(all.insert(w).second);  // globally unique
        }
    }
    CHECK(all.size() == kWordListCount * kWordsPerList);
}

TEST_CASE("seed field text form is stable") {
    SeedSet s{{"base", std::string("abc")}, {"start", std::uint64_t{5}},
              {"tld", std::string("com")}};
    CHECK(seed_to_string(s) == "base=abc,start=5,tld=com");
    CHECK(seed_to_string({}) == "");
}
