#include "dgakit/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>

namespace dgakit {

namespace {

bool is_md5(std::string_view s) {
    if (s.size() != 32) return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

}  // namespace

std::optional<DnsType> parse_dns_type(std::string_view s) {
    if (s == "A") return DnsType::kA;
    if (s == "AAAA") return DnsType::kAaaa;
    if (s == "MX") return DnsType::kMx;
    if (s == "PTR") return DnsType::kPtr;
    if (s == "TXT") return DnsType::kTxt;
    if (s == "NS") return DnsType::kNs;
    return std::nullopt;
}

std::string_view to_string(DnsType t) {
    switch (t) {
        case DnsType::kA: return "A";
        case DnsType::kAaaa: return "AAAA";
        case DnsType::kMx: return "MX";
        case DnsType::kPtr: return "PTR";
        case DnsType::kTxt: return "TXT";
        case DnsType::kNs: return "NS";
    }
    return "?";
}

ParsedLog parse_log(std::istream& in) {
    ParsedLog out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        auto fields = split(line, '\t');
        if (fields.size() != 5) {
            out.errors.push_back({lineno, "expected 5 fields, got " + std::to_string(fields.size())});
            continue;
        }

        DnsLogRecord rec;
        const std::string& ts = fields[0];
        bool ts_ok = !ts.empty() && ts.size() <= 18;
        for (char c : ts)
            if (c < '0' || c > '9') ts_ok = false;
        if (!ts_ok) {
            out.errors.push_back({lineno, "bad timestamp: " + ts});
            continue;
        }
        rec.timestamp = std::stoll(ts);

        rec.md5hash = to_lower(fields[1]);
        if (!is_md5(rec.md5hash)) {
            out.errors.push_back({lineno, "bad md5 hash: " + fields[1]});
            continue;
        }

        rec.domain = fields[2];

        auto type = parse_dns_type(fields[3]);
        if (!type) {
            out.errors.push_back({lineno, "bad dns type: " + fields[3]});
            continue;
        }
        rec.dns_type = *type;

        rec.dns_response = fields[4];
        if (rec.dns_response.empty()) {
            out.errors.push_back({lineno, "empty dns response"});
            continue;
        }

        out.records.push_back(std::move(rec));
    }
    return out;
}

ParsedLog parse_log_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    return parse_log(in);
}

std::vector<FilteredRecord> filter_records(const std::vector<DnsLogRecord>& records,
                                           FilterStats* stats) {
    FilterStats local;
    FilterStats& st = stats ? *stats : local;
    st = FilterStats{};
    st.input = records.size();

    std::vector<FilteredRecord> out;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;  // (hash, domain) -> index

    for (const auto& rec : records) {
        auto norm = normalize(rec.domain);
        if (std::holds_alternative<DomainRejection>(norm)) {
            switch (std::get<DomainRejection>(norm).error) {
                case DomainError::kTooShort: st.rejected_too_short++; break;
                case DomainError::kNoDot: st.rejected_no_dot++; break;
                case DomainError::kBadChar: st.rejected_bad_char++; break;
            }
            continue;
        }
        DomainName stripped = strip_subdomains(std::get<DomainName>(norm));
        if (stripped.normalized.size() < kMinDomainLength) {
            st.rejected_short_after_strip++;
            continue;
        }
        if (rec.dns_type == DnsType::kNs || rec.dns_type == DnsType::kPtr ||
            rec.dns_type == DnsType::kMx) {
            st.rejected_dns_type++;
            continue;
        }

        auto key = std::make_pair(rec.md5hash, stripped.normalized);
        auto it = seen.find(key);
        if (it != seen.end()) {
            st.deduplicated++;
            FilteredRecord& kept = out[it->second];
            kept.first_ts = std::min(kept.first_ts, rec.timestamp);
            kept.nxdomain = kept.nxdomain || rec.nxdomain();
            continue;
        }
        seen.emplace(std::move(key), out.size());
        out.push_back({rec.timestamp, rec.md5hash, std::move(stripped), rec.dns_type,
                       rec.nxdomain()});
        st.kept++;
    }
    return out;
}

std::vector<SampleBatch> group_samples(const std::vector<FilteredRecord>& records,
                                       GroupStats* stats) {
    GroupStats local;
    GroupStats& st = stats ? *stats : local;
    st = GroupStats{};

    std::map<std::string, std::vector<FilteredRecord>> by_hash;
    for (const auto& r : records) by_hash[r.md5hash].push_back(r);

    std::vector<SampleBatch> out;
    for (auto& [hash, recs] : by_hash) {
        if (recs.size() < kMinSampleDomains) {
            st.dropped_too_few_domains++;
            st.drops.push_back({hash, "only " + std::to_string(recs.size()) + " unique domains"});
            continue;
        }
        std::size_t nx = 0;
        std::int64_t min_ts = recs.front().first_ts;
        for (const auto& r : recs) {
            if (r.nxdomain) ++nx;
            min_ts = std::min(min_ts, r.first_ts);
        }
        double ratio = static_cast<double>(nx) / static_cast<double>(recs.size());
        if (ratio < kMinNxRatio) {
            st.dropped_low_nx_ratio++;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "nxdomain ratio %.3f below %.2f", ratio, kMinNxRatio);
            st.drops.push_back({hash, buf});
            continue;
        }
        SampleBatch b;
        b.md5hash = hash;
        b.domains = std::move(recs);
        b.nxdomain_ratio = ratio;
        b.execution_date = date_from_epoch(min_ts);
        out.push_back(std::move(b));
        st.kept++;
    }
    return out;
}

Allowlist Allowlist::load(const std::string& path, std::size_t max_entries) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("allowlist: cannot open " + path);
    Allowlist list;
    std::string line;
    while (std::getline(in, line)) {
        if (max_entries && list.size() >= max_entries) break;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        list.insert(line);
    }
    return list;
}

void Allowlist::insert(std::string_view domain) {
    auto norm = normalize(domain);
    if (!std::holds_alternative<DomainName>(norm)) return;
    domains_.insert(strip_subdomains(std::get<DomainName>(norm)).normalized);
}

AllowlistSplit apply_allowlist(const SampleBatch& batch, const Allowlist& list) {
    AllowlistSplit split;
    for (std::size_t i = 0; i < batch.domains.size(); ++i) {
        if (list.contains(batch.domains[i].domain.normalized))
            split.allowlisted.push_back(i);
        else
            split.to_classify.push_back(i);
    }
    return split;
}

}  // namespace dgakit
