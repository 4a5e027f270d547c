#pragma once

// DNS log ingestion: TSV parsing, record-level filtering, grouping into
// per-sample batches and allowlist handling.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dgakit/domain.hpp"
#include "dgakit/util.hpp"

namespace dgakit {

inline constexpr std::size_t kMinSampleDomains = 20;
inline constexpr double kMinNxRatio = 0.5;

enum class DnsType { kA, kAaaa, kMx, kPtr, kTxt, kNs };

std::optional<DnsType> parse_dns_type(std::string_view s);
std::string_view to_string(DnsType t);

// One line of the sandbox DNS log:
//   timestamp \t md5hash \t domain \t dns_type \t dns_response
struct DnsLogRecord {
    std::int64_t timestamp = 0;  // epoch seconds
    std::string md5hash;         // 32 hex chars, stored lowercase
    std::string domain;
    DnsType dns_type = DnsType::kA;
    std::string dns_response;

    bool nxdomain() const { return dns_response == "NXDOMAIN" || dns_response == "0.0.0.0"; }
};

struct MalformedRecord {
    std::size_t line = 0;
    std::string reason;
};

struct ParsedLog {
    std::vector<DnsLogRecord> records;
    std::vector<MalformedRecord> errors;
};

ParsedLog parse_log(std::istream& in);
ParsedLog parse_log_file(const std::string& path);  // throws if unreadable

struct FilterStats {
    std::size_t input = 0;
    std::size_t rejected_too_short = 0;
    std::size_t rejected_no_dot = 0;
    std::size_t rejected_bad_char = 0;
    std::size_t rejected_short_after_strip = 0;
    std::size_t rejected_dns_type = 0;
    std::size_t deduplicated = 0;
    std::size_t kept = 0;
};

// A unique (sample, domain) pair surviving the record filters. Duplicate
// queries fold into one record keeping the earliest timestamp; the domain
// counts as NXDomain if any of its queries came back unresolved.
struct FilteredRecord {
    std::int64_t first_ts = 0;
    std::string md5hash;
    DomainName domain;  // stripped to two labels
    DnsType dns_type = DnsType::kA;
    bool nxdomain = false;
};

std::vector<FilteredRecord> filter_records(const std::vector<DnsLogRecord>& records,
                                           FilterStats* stats = nullptr);

struct SampleBatch {
    std::string md5hash;
    std::vector<FilteredRecord> domains;  // unique, first-seen order
    double nxdomain_ratio = 0.0;
    CivilDate execution_date;  // UTC date of the earliest query
};

struct GroupDrop {
    std::string md5hash;
    std::string reason;
};

struct GroupStats {
    std::size_t kept = 0;
    std::size_t dropped_too_few_domains = 0;
    std::size_t dropped_low_nx_ratio = 0;
    std::vector<GroupDrop> drops;
};

// Groups records by sample hash (output sorted by hash) and applies the
// batch-level filters: at least kMinSampleDomains unique domains and an
// NXDomain ratio of at least kMinNxRatio.
std::vector<SampleBatch> group_samples(const std::vector<FilteredRecord>& records,
                                       GroupStats* stats = nullptr);

// Known-benign domains, compared after stripping to two labels.
class Allowlist {
public:
    // One domain per line; blank lines and '#' comments are skipped, invalid
    // names ignored. max_entries of 0 means no cap.
    static Allowlist load(const std::string& path, std::size_t max_entries = 0);

    void insert(std::string_view domain);
    bool contains(const std::string& stripped_normalized) const {
        return domains_.count(stripped_normalized) != 0;
    }
    std::size_t size() const { return domains_.size(); }

private:
    std::set<std::string> domains_;
};

struct AllowlistSplit {
    std::vector<std::size_t> allowlisted;  // indices into batch.domains
    std::vector<std::size_t> to_classify;
};

AllowlistSplit apply_allowlist(const SampleBatch& batch, const Allowlist& list);

}  // namespace dgakit
