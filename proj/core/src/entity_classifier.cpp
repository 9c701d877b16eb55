#include "tract_equity/entity_classifier.hpp"

#include <algorithm>
#include <cctype>

#include "tract_equity/errors.hpp"

namespace tract_equity {

std::string_view owner_class_name(OwnerClass c) {
    switch (c) {
        case OwnerClass::Individual: return "individual";
        case OwnerClass::Corporate: return "corporate";
        case OwnerClass::Government: return "government";
        case OwnerClass::TrustEstateOther: return "trust_estate_other";
    }
    return "unknown";
}

std::optional<OwnerClass> owner_class_from_code(int code) {
    if (code < 1 || code > 4) return std::nullopt;
    return static_cast<OwnerClass>(code);
}

std::string normalize_owner_name(std::string_view name_raw) {
    std::string out;
    out.reserve(name_raw.size());
    for (char c : name_raw) {
        if (c == '.') continue;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

bool is_token_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '\'';
}

// Tokens of a normalized name: runs of [A-Z0-9'-]. Commas, ampersands and
// slashes all act as separators.
std::vector<std::string> tokenize(std::string_view normalized) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : normalized) {
        if (is_token_char(c)) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

bool contains_sequence(const std::vector<std::string>& tokens,
                       const std::vector<std::string>& seq) {
    if (seq.empty() || seq.size() > tokens.size()) return false;
    for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < seq.size(); ++j) {
            if (tokens[i + j] != seq[j]) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

std::size_t class_slot(OwnerClass cls) {
    switch (cls) {
        case OwnerClass::Corporate: return 0;
        case OwnerClass::Government: return 1;
        case OwnerClass::TrustEstateOther: return 2;
        case OwnerClass::Individual: break;
    }
    throw Error("Individual has no keyword list");
}

// Strips digits from a token; surnames keep letters, hyphens and apostrophes.
std::string surname_token(const std::string& token) {
    std::string out;
    for (char c : token) {
        if ((c >= 'A' && c <= 'Z') || c == '-' || c == '\'') out.push_back(c);
    }
    while (!out.empty() && (out.front() == '-' || out.front() == '\'')) out.erase(out.begin());
    while (!out.empty() && (out.back() == '-' || out.back() == '\'')) out.pop_back();
    bool has_alpha = std::any_of(out.begin(), out.end(),
                                 [](char c) { return c >= 'A' && c <= 'Z'; });
    return has_alpha ? out : std::string();
}

}  // namespace

EntityRules EntityRules::defaults() {
    EntityRules rules;
    for (const char* kw : {"LLC", "L.L.C.", "INC", "CORP", "CO", "LTD", "LP", "LLP",
                           "ASSOCIATES", "HOLDINGS", "PROPERTIES", "REALTY"}) {
        rules.add_keyword(OwnerClass::Corporate, kw);
    }
    for (const char* kw : {"CITY OF", "COUNTY OF", "STATE OF", "TOWN OF", "VILLAGE OF",
                           "AUTHORITY", "HOUSING AUTH"}) {
        rules.add_keyword(OwnerClass::Government, kw);
    }
    for (const char* kw : {"TRUST", "TRUSTEE", "ESTATE", "CHURCH", "FOUNDATION", "TEMPLE"}) {
        rules.add_keyword(OwnerClass::TrustEstateOther, kw);
    }
    return rules;
}

EntityRules EntityRules::empty() { return EntityRules(); }

void EntityRules::add_keyword(OwnerClass cls, std::string_view keyword) {
    std::string normalized = normalize_owner_name(keyword);
    if (tokenize(normalized).empty()) return;
    keywords_[class_slot(cls)].push_back(std::move(normalized));
}

const std::vector<std::string>& EntityRules::keywords(OwnerClass cls) const {
    return keywords_[class_slot(cls)];
}

bool EntityRules::has_any_keywords() const {
    return std::any_of(keywords_.begin(), keywords_.end(),
                       [](const auto& v) { return !v.empty(); });
}

EntityRules EntityRules::load(std::istream& in) {
    EntityRules rules = EntityRules::empty();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = line;
        if (auto pos = sv.find('#'); pos != std::string_view::npos) sv = sv.substr(0, pos);
        auto trimmed = sv;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
            trimmed.remove_prefix(1);
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.remove_suffix(1);
        if (trimmed.empty()) continue;

        auto eq = trimmed.find('=');
        if (eq == std::string_view::npos) {
            throw Error("entity rules line " + std::to_string(line_no) + ": expected key = values");
        }
        std::string key;
        for (char c : trimmed.substr(0, eq)) {
            if (!std::isspace(static_cast<unsigned char>(c)))
                key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        std::string_view values = trimmed.substr(eq + 1);

        OwnerClass cls;
        if (key == "corporate") {
            cls = OwnerClass::Corporate;
        } else if (key == "government") {
            cls = OwnerClass::Government;
        } else if (key == "trust_estate_other") {
            cls = OwnerClass::TrustEstateOther;
        } else if (key == "surname_convention") {
            std::string v;
            for (char c : values) {
                if (!std::isspace(static_cast<unsigned char>(c)))
                    v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
            if (v == "last_first") {
                rules.surname_convention = SurnameConvention::LastFirst;
            } else if (v == "first_last") {
                rules.surname_convention = SurnameConvention::FirstLast;
            } else {
                throw Error("entity rules line " + std::to_string(line_no) +
                            ": surname_convention must be last_first or first_last");
            }
            continue;
        } else {
            throw Error("entity rules line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }

        std::size_t start = 0;
        std::string vals(values);
        while (start <= vals.size()) {
            auto comma = vals.find(',', start);
            std::string item = vals.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
            if (!tokenize(normalize_owner_name(item)).empty()) {
                rules.add_keyword(cls, item);
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return rules;
}

OwnerClass classify_owner(std::string_view name_raw, const EntityRules& rules) {
    std::string normalized = normalize_owner_name(name_raw);
    std::vector<std::string> tokens = tokenize(normalized);
    if (tokens.empty()) throw EmptyNameError();

    // Precedence: Government, TrustEstateOther, Corporate.
    for (OwnerClass cls : {OwnerClass::Government, OwnerClass::TrustEstateOther,
                           OwnerClass::Corporate}) {
        for (const std::string& kw : rules.keywords(cls)) {
            if (contains_sequence(tokens, tokenize(kw))) return cls;
        }
    }
    return OwnerClass::Individual;
}

SurnameResult extract_surname(std::string_view name_raw, const EntityRules& rules) {
    SurnameResult result;
    std::string normalized = normalize_owner_name(name_raw);
    if (tokenize(normalized).empty()) {
        result.error = SurnameError::UnparseableName;
        return result;
    }
    if (classify_owner(name_raw, rules) != OwnerClass::Individual) {
        result.error = SurnameError::NotAnIndividual;
        return result;
    }

    // Co-owned records list owners joined by '&'; the first owner's surname
    // is attributed to the property.
    std::string_view scope = normalized;
    if (auto amp = scope.find('&'); amp != std::string_view::npos) scope = scope.substr(0, amp);

    auto comma = scope.find(',');
    if (comma != std::string_view::npos) {
        // "LAST, FIRST": the token immediately before the comma is the surname.
        std::vector<std::string> pre = tokenize(scope.substr(0, comma));
        for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
            std::string s = surname_token(*it);
            if (!s.empty()) {
                result.extraction = SurnameExtraction{
                    std::move(s), SurnameExtraction::Confidence::FormatMatched};
                return result;
            }
        }
        // Fall through to the positional heuristic when nothing usable
        // precedes the comma (e.g. ", JOHN").
    }

    std::vector<std::string> tokens = tokenize(scope);
    if (rules.surname_convention == SurnameConvention::LastFirst) {
        for (const std::string& t : tokens) {
            std::string s = surname_token(t);
            if (!s.empty()) {
                result.extraction =
                    SurnameExtraction{std::move(s), SurnameExtraction::Confidence::Heuristic};
                return result;
            }
        }
    } else {
        for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
            std::string s = surname_token(*it);
            if (!s.empty()) {
                result.extraction =
                    SurnameExtraction{std::move(s), SurnameExtraction::Confidence::Heuristic};
                return result;
            }
        }
    }
    result.error = SurnameError::UnparseableName;
    return result;
}

}  // namespace tract_equity
