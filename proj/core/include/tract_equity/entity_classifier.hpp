#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tract_equity {

// Owner-type codes used throughout the pipeline. Codes 2, 3 and 4 are
// collectively "non-individual" (corporate-like) when computing corporate
// ownership shares.
enum class OwnerClass : int {
    Individual = 1,
    Corporate = 2,
    Government = 3,
    TrustEstateOther = 4,
};

std::string_view owner_class_name(OwnerClass c);
std::optional<OwnerClass> owner_class_from_code(int code);

inline bool is_individual(OwnerClass c) { return c == OwnerClass::Individual; }

// Token layout of individual owner names in the source file. NYS assessment
// rolls use "LAST FIRST [MIDDLE]"; some county exports use "FIRST LAST".
// Comma-separated names ("LAST, FIRST") are recognized under either setting.
enum class SurnameConvention { LastFirst, FirstLast };

struct SurnameExtraction {
    enum class Confidence { FormatMatched, Heuristic };
    std::string surname;  // uppercase, alphabetic plus hyphen/apostrophe
    Confidence confidence = Confidence::Heuristic;
};

enum class SurnameError { NotAnIndividual, UnparseableName };

// Ordered keyword rule table. Matching precedence is fixed: Government, then
// TrustEstateOther, then Corporate; the first keyword hit wins. Keywords are
// matched against whole tokens of the uppercased, period-stripped name;
// multi-word keywords ("CITY OF") must appear as consecutive tokens.
class EntityRules {
public:
    // The built-in keyword inventory (LLC/INC/CORP/..., CITY OF/..., TRUST/...).
    static EntityRules defaults();

    // An empty rule set classifies every nonempty name as Individual.
    static EntityRules empty();

    // Loads a flat key/list config:
    //     corporate = LLC, INC, CORP
    //     government = CITY OF, COUNTY OF
    //     trust_estate_other = TRUST, ESTATE
    // Lines starting with '#' are comments. Keys may repeat; lists accumulate.
    static EntityRules load(std::istream& in);

    void add_keyword(OwnerClass cls, std::string_view keyword);

    const std::vector<std::string>& keywords(OwnerClass cls) const;
    bool has_any_keywords() const;

    SurnameConvention surname_convention = SurnameConvention::LastFirst;

private:
    // index 0 = Corporate, 1 = Government, 2 = TrustEstateOther
    std::array<std::vector<std::string>, 3> keywords_;
};

// Deterministic rule-based classification. Case- and period-insensitive.
// Throws EmptyNameError when the name is empty after trimming.
OwnerClass classify_owner(std::string_view name_raw, const EntityRules& rules);

// Surname of the first listed owner, for individual-owned records only.
// "LAST, FIRST" yields the token before the comma (FormatMatched); otherwise
// the convention decides which end of the token list holds the surname
// (Heuristic). Ampersand-joined co-owners share the first owner's surname.
// Returns SurnameError::NotAnIndividual when the rules classify the name as
// an entity, UnparseableName when no alphabetic token exists.
struct SurnameResult {
    std::optional<SurnameExtraction> extraction;
    std::optional<SurnameError> error;

    bool ok() const { return extraction.has_value(); }
};

SurnameResult extract_surname(std::string_view name_raw, const EntityRules& rules);

// Uppercases and strips periods; the canonical form used for matching.
std::string normalize_owner_name(std::string_view name_raw);

}  // namespace tract_equity
