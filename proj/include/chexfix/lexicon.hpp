#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/text.hpp"

namespace chexfix {

enum class Category { EndotrachealTube, OtherTubeCatheter, Lesion, Pneumothorax, Other };

std::string_view to_string(Category c) noexcept;
std::optional<Category> category_from_string(std::string_view s) noexcept;

/// Canonical object name used for every endotracheal-tube synonym.
inline constexpr std::string_view kEndotrachealTube = "endotracheal tube";
inline constexpr std::string_view kCarina = "carina";

struct LexiconMatch {
    Category category;
    std::string phrase;       // lexicon phrase as configured
    std::string object_name;  // canonical name
    Span span;                // position in the searched text
};

/// Category term list. Matching is case-insensitive, whole-word, and
/// prefers the longest phrase starting at a position.
class CategoryLexicon {
public:
    /// Terms seeded from the common report vocabulary for each category.
    static CategoryLexicon defaults();

    /// One `category<TAB>phrase` per line; blank lines and '#' comments are
    /// skipped. Throws IngestError with the offending line number.
    static CategoryLexicon parse(std::istream& in);
    static CategoryLexicon load(const std::filesystem::path& path);

    void add(Category category, std::string phrase);

    /// Non-overlapping matches, left to right.
    std::vector<LexiconMatch> find_all(std::string_view text) const;

    /// Category of a canonical object name or any configured phrase.
    std::optional<Category> category_of(std::string_view object_name) const;

    /// Phrases that denote `object_name` (all synonyms for the ETT).
    std::vector<std::string> phrases_for(std::string_view object_name) const;

    std::size_t size() const noexcept { return entries_.size(); }

private:
    struct Entry {
        Category category;
        std::string phrase;  // lower-case
    };
    std::vector<Entry> entries_;  // longest first

    static std::string canonical_name(Category category, std::string_view phrase);
};

}  // namespace chexfix
