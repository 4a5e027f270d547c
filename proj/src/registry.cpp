#include "dgakit/registry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dgakit/util.hpp"

namespace dgakit {

namespace {

// Class render order: digits, then letters, '-' handled separately.
constexpr std::string_view kClassOrder = "0123456789abcdefghijklmnopqrstuvwxyz";

bool valid_class_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

}  // namespace

bool FamilyRegex::matches(const DomainName& d) const {
    if (catch_all) return true;
    if (d.sld.size() < min_len || d.sld.size() > max_len) return false;
    for (char c : d.sld)
        if (!allows(c)) return false;
    return std::binary_search(tlds.begin(), tlds.end(), d.tld);
}

std::string FamilyRegex::render() const {
    if (catch_all) return ".*";
    std::string out = "[";
    std::size_t i = 0;
    while (i < kClassOrder.size()) {
        if (!allowed[char_code(kClassOrder[i])]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < kClassOrder.size() && kClassOrder[j + 1] == kClassOrder[j] + 1 &&
               allowed[char_code(kClassOrder[j + 1])])
            ++j;
        if (j - i >= 2) {
            out.push_back(kClassOrder[i]);
            out.push_back('-');
            out.push_back(kClassOrder[j]);
        } else {
            for (std::size_t k = i; k <= j; ++k) out.push_back(kClassOrder[k]);
        }
        i = j + 1;
    }
    if (allowed[char_code('-')]) out.push_back('-');
    out.push_back(']');
    if (min_len == max_len) {
        out += "{" + std::to_string(min_len) + "}";
    } else {
        out += "{" + std::to_string(min_len) + "," + std::to_string(max_len) + "}";
    }
    out += "\\.(";
    for (std::size_t k = 0; k < tlds.size(); ++k) {
        if (k) out.push_back('|');
        out += tlds[k];
    }
    out += ")$";
    return out;
}

std::optional<FamilyRegex> FamilyRegex::parse(std::string_view p) {
    if (p == ".*") return make_catch_all();

    FamilyRegex r;
    std::size_t i = 0;
    auto expect = [&](char c) {
        if (i >= p.size() || p[i] != c) return false;
        ++i;
        return true;
    };

    if (!expect('[')) return std::nullopt;
    bool any = false;
    while (i < p.size() && p[i] != ']') {
        char c = p[i];
        if (!valid_class_char(c)) return std::nullopt;
        if (i + 2 < p.size() && p[i + 1] == '-' && p[i + 2] != ']') {
            char hi = p[i + 2];
            if (!valid_class_char(hi) || hi < c || c == '-') return std::nullopt;
            for (char x = c; x <= hi; ++x) {
                if (!valid_class_char(x)) return std::nullopt;
                r.allowed[char_code(x)] = true;
            }
            i += 3;
        } else {
            r.allowed[char_code(c)] = true;
            ++i;
        }
        any = true;
    }
    if (!any || !expect(']')) return std::nullopt;

    if (!expect('{')) return std::nullopt;
    auto read_num = [&]() -> std::optional<std::size_t> {
        if (i >= p.size() || p[i] < '0' || p[i] > '9') return std::nullopt;
        std::size_t v = 0;
        while (i < p.size() && p[i] >= '0' && p[i] <= '9') v = v * 10 + (p[i++] - '0');
        return v;
    };
    auto lo = read_num();
    if (!lo) return std::nullopt;
    r.min_len = r.max_len = *lo;
    if (i < p.size() && p[i] == ',') {
        ++i;
        auto hi = read_num();
        if (!hi || *hi < *lo) return std::nullopt;
        r.max_len = *hi;
    }
    if (!expect('}')) return std::nullopt;
    if (r.min_len == 0) return std::nullopt;

    if (!expect('\\') || !expect('.') || !expect('(')) return std::nullopt;
    std::string tld;
    while (i < p.size() && p[i] != ')') {
        char c = p[i];
        if (c == '|') {
            if (tld.empty()) return std::nullopt;
            r.tlds.push_back(tld);
            tld.clear();
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            tld.push_back(c);
        } else {
            return std::nullopt;
        }
        ++i;
    }
    if (tld.empty()) return std::nullopt;
    r.tlds.push_back(tld);
    if (!expect(')') || !expect('$') || i != p.size()) return std::nullopt;

    std::sort(r.tlds.begin(), r.tlds.end());
    r.tlds.erase(std::unique(r.tlds.begin(), r.tlds.end()), r.tlds.end());
    return r;
}

FamilyRegex FamilyRegex::make(std::string_view chars, std::size_t min_len, std::size_t max_len,
                              std::vector<std::string> tlds) {
    if (min_len == 0 || min_len > max_len || chars.empty() || tlds.empty())
        throw std::invalid_argument("bad regex parameters");
    FamilyRegex r;
    for (char c : chars) {
        if (!valid_class_char(c)) throw std::invalid_argument("bad class char");
        r.allowed[char_code(c)] = true;
    }
    r.min_len = min_len;
    r.max_len = max_len;
    std::sort(tlds.begin(), tlds.end());
    tlds.erase(std::unique(tlds.begin(), tlds.end()), tlds.end());
    r.tlds = std::move(tlds);
    return r;
}

FamilyRegex FamilyRegex::make_catch_all() {
    FamilyRegex r;
    r.catch_all = true;
    return r;
}

std::size_t argmax(const ProbabilityVector& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

FamilyRegistry FamilyRegistry::make(std::vector<FamilyLabel> labels) {
    if (labels.empty()) throw std::runtime_error("registry: no labels");
    std::set<std::string> names;
    std::optional<std::size_t> benign;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!names.insert(labels[i].name).second)
            throw std::runtime_error("registry: duplicate label " + labels[i].name);
        if (labels[i].is_benign()) {
            if (benign) throw std::runtime_error("registry: multiple catch-all labels");
            benign = i;
        }
    }
    if (!benign) throw std::runtime_error("registry: missing catch-all benign label");
    FamilyRegistry reg;
    reg.labels_ = std::move(labels);
    reg.benign_ = *benign;
    return reg;
}

FamilyRegistry FamilyRegistry::load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("registry: cannot open " + path);
    std::vector<FamilyLabel> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() != 4)
            throw std::runtime_error("registry: " + path + ":" + std::to_string(lineno) +
                                     ": expected 4 fields");
        FamilyLabel l;
        l.name = fields[0];
        if (fields[1] != "0" && fields[1] != "1")
            throw std::runtime_error("registry: " + path + ":" + std::to_string(lineno) +
                                     ": deterministic must be 0 or 1");
        l.deterministic = fields[1] == "1";
        try {
            std::size_t used = 0;
            l.threshold = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::runtime_error("registry: " + path + ":" + std::to_string(lineno) +
                                     ": bad threshold");
        }
        auto rx = FamilyRegex::parse(fields[3]);
        if (!rx)
            throw std::runtime_error("registry: " + path + ":" + std::to_string(lineno) +
                                     ": bad pattern " + fields[3]);
        l.regex = std::move(*rx);
        labels.push_back(std::move(l));
    }
    return make(std::move(labels));
}

void FamilyRegistry::save_tsv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("registry: cannot write " + path);
    for (const auto& l : labels_) {
        char thr[32];
        std::snprintf(thr, sizeof(thr), "%.6g", l.threshold);
        out << l.name << '\t' << (l.deterministic ? '1' : '0') << '\t' << thr << '\t'
            << l.regex.render() << '\n';
    }
    if (!out) throw std::runtime_error("registry: write failed for " + path);
}

std::optional<std::size_t> FamilyRegistry::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i].name == name) return i;
    return std::nullopt;
}

std::size_t FamilyRegistry::majority(const std::vector<std::size_t>& votes) const {
    if (votes.empty()) return benign_;
    std::vector<std::size_t> counts(labels_.size(), 0);
    for (auto v : votes) counts.at(v)++;
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = i;
    return best;
}

}  // namespace dgakit
