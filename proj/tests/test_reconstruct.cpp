#include <doctest.h>

#include <algorithm>

#include "dgakit/reconstruct.hpp"
#include "dgakit/zoo.hpp"

using namespace dgakit;

namespace {

std::vector<DomainName> as_domains(const std::vector<std::string>& raw) {
    std::vector<DomainName> out;
    for (const auto& s : raw) {
        auto r = normalize(s);
        REQUIRE(std::holds_alternative<DomainName>(r));
        out.push_back(std::get<DomainName>(r));
    }
    return out;
}

std::vector<DomainName> family_batch(const char* family, const SeedSet& seed,
                                     const CivilDate& date, std::size_t n) {
    return as_domains(find_family(family)->generate(seed, date, n));
}

std::uint64_t seed_u64(const ReconstructionResult& r, const char* field) {
    REQUIRE(r.seed.has_value());
    REQUIRE(r.seed->count(field) == 1);
    return std::get<std::uint64_t>(r.seed->at(field));
}

std::string seed_str(const ReconstructionResult& r, const char* field) {
    REQUIRE(r.seed.has_value());
    REQUIRE(r.seed->count(field) == 1);
    return std::get<std::string>(r.seed->at(field));
}

const CivilDate kDay = {2026, 3, 5};

}  // namespace

TEST_CASE("permutation batches collapse to their sorted base") {
    SeedSet orig = {{"base", std::string("getadobeflashplayer")}, {"tld", std::string("net")}};
    auto batch = family_batch("permdga", orig, kDay, 50);
    auto r = reconstruct_seed("permdga", batch, kDay);

    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.strategy == "anagram class");
    CHECK(r.coverage == 1.0);
    std::string sorted = "getadobeflashplayer";
    std::sort(sorted.begin(), sorted.end());
    CHECK(seed_str(r, "base") == sorted);
    CHECK(seed_str(r, "tld") == "net");

    // the recovered seed regenerates anagrams of the original batch
    auto regen = find_family("permdga")->generate(*r.seed, kDay, 5);
    for (const auto& g : regen) {
        auto parsed = std::get<DomainName>(normalize(g));
        std::string key = parsed.sld;
        std::sort(key.begin(), key.end());
        CHECK(key == sorted);
    }
}

TEST_CASE("permutation recovery tolerates a minority of foreign domains") {
    SeedSet orig = {{"base", std::string("cloudsyncmanager")}, {"tld", std::string("com")}};
    auto batch = family_batch("permdga", orig, kDay, 40);
    auto noise = family_batch("permdga", {{"base", std::string("networkmonitor")},
                                          {"tld", std::string("net")}}, kDay, 10);
    batch.insert(batch.end(), noise.begin(), noise.end());

    auto r = reconstruct_seed("permdga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.coverage == doctest::Approx(0.8));

    // a three-way split clears no class past the required fraction
    auto third = family_batch("permdga", {{"base", std::string("backupstorage")},
                                          {"tld", std::string("com")}}, kDay, 40);
    batch.resize(20);
    noise.resize(20);
    third.resize(20);
    batch.insert(batch.end(), noise.begin(), noise.end());
    batch.insert(batch.end(), third.begin(), third.end());
    CHECK(reconstruct_seed("permdga", batch, kDay).status == ReconstructStatus::kNoSeedFound);
}

TEST_CASE("counter batches extrapolate back to the smallest counter") {
    SeedSet orig = {{"base", std::string("ns1dnsfor")}, {"start", std::uint64_t(990)},
                    {"tld", std::string("com")}};
    auto batch = family_batch("iterdga", orig, kDay, 50);
    auto r = reconstruct_seed("iterdga", batch, kDay);

    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.strategy == "counter extrapolation");
    CHECK(r.coverage == 1.0);
    CHECK(seed_str(r, "base") == "ns1dnsfor");
    CHECK(seed_u64(r, "start") == 990);
    CHECK(seed_str(r, "tld") == "com");
}

TEST_CASE("counter recovery needs a shared stem") {
    auto one = reconstruct_seed("iterdga", as_domains({"abc1.com"}), kDay);
    CHECK(one.status == ReconstructStatus::kNoSeedFound);

    auto no_digits = reconstruct_seed("iterdga", as_domains({"abcx.com", "abcy.com"}), kDay);
    CHECK(no_digits.status == ReconstructStatus::kNoSeedFound);
    CHECK(no_digits.note == "no digit tails found");

    // all stems distinct
    auto scattered =
        reconstruct_seed("iterdga", as_domains({"aaa1.com", "bbb2.com", "ccc3.com"}), kDay);
    CHECK(scattered.status == ReconstructStatus::kNoSeedFound);
    CHECK(scattered.note == "no shared base");

    // padded counters do not occur in this family
    auto padded =
        reconstruct_seed("iterdga", as_domains({"abc007.com", "abc008.com", "abc009.com"}), kDay);
    CHECK(padded.status == ReconstructStatus::kNoSeedFound);
}

TEST_CASE("counter recovery rides out foreign noise") {
    SeedSet orig = {{"base", std::string("updsvc")}, {"start", std::uint64_t(100)},
                    {"tld", std::string("net")}};
    auto batch = family_batch("iterdga", orig, kDay, 40);
    auto noise = as_domains({"zzz9.org", "yyy8.org", "xxx7.org", "www6.org", "vvv5.org",
                             "uuu4.org", "ttt3.org", "sss2.org", "rrr1.org", "qqq0.org"});
    batch.insert(batch.end(), noise.begin(), noise.end());

    auto r = reconstruct_seed("iterdga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(seed_u64(r, "start") == 100);
    CHECK(r.coverage == doctest::Approx(0.8));
}

TEST_CASE("keyed sweep recovers seed and day") {
    SeedSet orig = {{"seed", std::uint64_t(0x1234)}, {"tld", std::string("com")}};
    auto batch = family_batch("lcgdga", orig, kDay, 50);

    auto r = reconstruct_seed("lcgdga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.strategy == "keyed state sweep");
    CHECK(r.coverage == 1.0);
    CHECK(seed_u64(r, "seed") == 0x1234);
    CHECK(seed_str(r, "tld") == "com");
    REQUIRE(r.seed_date.has_value());
    CHECK(date_key(*r.seed_date) == date_key(kDay));
    CHECK(r.evaluations == kLcgSeedSpace * 3);

    // generation day one off from the observed execution day still lands
    auto shifted = reconstruct_seed("lcgdga", batch, add_days(kDay, 1));
    CHECK(shifted.status == ReconstructStatus::kSuccess);
    CHECK(seed_u64(shifted, "seed") == 0x1234);
    REQUIRE(shifted.seed_date.has_value());
    CHECK(date_key(*shifted.seed_date) == date_key(kDay));
}

TEST_CASE("keyed sweep budget handling") {
    SeedSet orig = {{"seed", std::uint64_t(0xABCD)}, {"tld", std::string("net")}};
    auto batch = family_batch("lcgdga", orig, kDay, 30);

    ReconstructOptions tiny;
    tiny.budget = 1000;
    auto r = reconstruct_seed("lcgdga", batch, kDay, tiny);
    CHECK(r.status == ReconstructStatus::kBudgetExhausted);
    CHECK(r.evaluations == 0);

    // enough budget to start sweeping but not to reach seed 0xABCD
    ReconstructOptions partial;
    partial.budget = kLcgSeedSpace + 1000;
    auto p = reconstruct_seed("lcgdga", batch, kDay, partial);
    CHECK(p.status == ReconstructStatus::kBudgetExhausted);
    CHECK(p.evaluations == partial.budget);
}

TEST_CASE("keyed sweep parallel path agrees with the serial one") {
    SeedSet orig = {{"seed", std::uint64_t(0x2468)}, {"tld", std::string("net")}};
    auto batch = family_batch("lcgdga", orig, kDay, 40);

    ReconstructOptions par;
    par.threads = 4;
    auto a = reconstruct_seed("lcgdga", batch, kDay, par);
    auto b = reconstruct_seed("lcgdga", batch, kDay);
    CHECK(a.status == ReconstructStatus::kSuccess);
    CHECK(seed_u64(a, "seed") == seed_u64(b, "seed"));
    CHECK(a.coverage == b.coverage);
    CHECK(date_key(*a.seed_date) == date_key(*b.seed_date));
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("keyed sweep rejects foreign batches") {
    // right shape, wrong generator
    Rng rng(42);
    std::vector<std::string> raw;
    for (int i = 0; i < 30; ++i) {
        std::string sld;
        for (int j = 0; j < 12; ++j) sld.push_back('a' + char(rng.bounded(26)));
        raw.push_back(sld + ".com");
    }
    auto r = reconstruct_seed("lcgdga", as_domains(raw), kDay);
    CHECK(r.status == ReconstructStatus::kNoSeedFound);

    auto wrong_tld = reconstruct_seed("lcgdga", as_domains({"abcdefghijkl.org"}), kDay);
    CHECK(wrong_tld.status == ReconstructStatus::kNoSeedFound);
}

TEST_CASE("residue sweep collapses the full seed space") {
    SeedSet orig = {{"seed", std::uint64_t(987654321)}};
    auto batch = family_batch("moddga", orig, kDay, 50);

    auto r = reconstruct_seed("moddga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.strategy == "residue sweep");
    CHECK(r.coverage == 1.0);
    CHECK(seed_u64(r, "seed") == 987654321 % kModDgaModulus);
    CHECK(r.evaluations == kModDgaModulus);

    ReconstructOptions tiny;
    tiny.budget = 100;
    CHECK(reconstruct_seed("moddga", batch, kDay, tiny).status ==
          ReconstructStatus::kBudgetExhausted);
}

TEST_CASE("residue sweep rejects foreign batches") {
    Rng rng(7);
    std::vector<std::string> raw;
    for (int i = 0; i < 20; ++i) {
        std::string sld;
        for (int j = 0; j < 14; ++j) sld.push_back('a' + char(rng.bounded(26)));
        raw.push_back(sld + (i % 2 ? ".biz" : ".info"));
    }
    auto r = reconstruct_seed("moddga", as_domains(raw), kDay);
    CHECK(r.status == ReconstructStatus::kNoSeedFound);
}

TEST_CASE("dictionary batches map back to list and start") {
    SeedSet orig = {{"list", std::uint64_t(2)}, {"start", std::uint64_t(5000)}};
    auto batch = family_batch("worddga", orig, kDay, 60);

    auto r = reconstruct_seed("worddga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.strategy == "dictionary index mapping");
    CHECK(r.coverage == 1.0);
    CHECK(seed_u64(r, "list") == 2);
    CHECK(seed_u64(r, "start") == 5000);
}

TEST_CASE("dictionary recovery handles index wraparound") {
    SeedSet orig = {{"list", std::uint64_t(1)}, {"start", std::uint64_t(16380)}};
    auto batch = family_batch("worddga", orig, kDay, 10);

    auto r = reconstruct_seed("worddga", batch, kDay);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.coverage == 1.0);
    CHECK(seed_u64(r, "start") == 16380);
}

TEST_CASE("dictionary recovery rejects foreign batches") {
    auto lcg = family_batch("lcgdga", {{"seed", std::uint64_t(9)}, {"tld", std::string("net")}},
                            kDay, 20);
    auto r = reconstruct_seed("worddga", lcg, kDay);
    CHECK(r.status == ReconstructStatus::kNoSeedFound);
    CHECK(r.note == "domains are not word-pair concatenations");
}

TEST_CASE("labels without a generator are not applicable") {
    auto batch = as_domains({"whatever.top", "something.top"});
    CHECK(reconstruct_seed("ticksdga", batch, kDay).status == ReconstructStatus::kNotApplicable);
    CHECK(reconstruct_seed("benign", batch, kDay).status == ReconstructStatus::kNotApplicable);
    CHECK_THROWS_AS(reconstruct_seed("nosuchfamily", batch, kDay), std::invalid_argument);
    CHECK_THROWS_AS(reconstruct_seed("permdga", {}, kDay), std::invalid_argument);
}

TEST_CASE("input cap limits the considered window") {
    SeedSet orig = {{"base", std::string("proxyserverfarm")}, {"tld", std::string("net")}};
    auto batch = family_batch("permdga", orig, kDay, 80);

    ReconstructOptions opts;
    opts.max_domains = 10;
    auto r = reconstruct_seed("permdga", batch, kDay, opts);
    CHECK(r.status == ReconstructStatus::kSuccess);
    CHECK(r.coverage == 1.0);
}
