#include "chexfix/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "chexfix/errors.hpp"

namespace chexfix {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::EndotrachealTube: return "endotracheal_tube";
        case Category::OtherTubeCatheter: return "other_tube_catheter";
        case Category::Lesion: return "lesion";
        case Category::Pneumothorax: return "pneumothorax";
        case Category::Other: return "other";
    }
    return "other";
}

std::optional<Category> category_from_string(std::string_view s) noexcept {
    for (Category c : {Category::EndotrachealTube, Category::OtherTubeCatheter, Category::Lesion,
                       Category::Pneumothorax, Category::Other}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

CategoryLexicon CategoryLexicon::defaults() {
    CategoryLexicon lex;
    for (const char* p : {"endotracheal tube", "endotracheal", "et tube", "ett",
                          "endotracheal tube tip", "et tube tip", "ett tip"}) {
        lex.add(Category::EndotrachealTube, p);
    }
    for (const char* p : {"tracheostomy tube", "picc", "picc line", "central venous line",
                          "central venous catheter", "central line", "internal jugular vein catheter",
                          "internal jugular catheter", "catheter", "enteric tube", "nasogastric tube",
                          "ng tube", "og tube", "orogastric tube", "feeding tube", "dobhoff tube",
                          "chest tube", "swan-ganz catheter", "pulmonary artery catheter"}) {
        lex.add(Category::OtherTubeCatheter, p);
    }
    for (const char* p : {"opacity", "opacities", "mass", "nodule", "nodules", "lesion",
                          "nodular opacity", "consolidation"}) {
        lex.add(Category::Lesion, p);
    }
    lex.add(Category::Pneumothorax, "pneumothorax");
    for (const char* p : {"calcification", "balloon pump", "intra-aortic balloon pump", "pacemaker lead",
                          "effusion", "pleural effusion"}) {
        lex.add(Category::Other, p);
    }
    return lex;
}

CategoryLexicon CategoryLexicon::parse(std::istream& in) {
    CategoryLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw IngestError("expected category<TAB>phrase", lineno);
        const auto category = category_from_string(line.substr(0, tab));
        if (!category) throw IngestError("unknown category '" + line.substr(0, tab) + "'", lineno);
        std::string phrase = line.substr(tab + 1);
        if (phrase.empty() || phrase.find('\t') != std::string::npos) {
            throw IngestError("phrase must be a single non-empty field", lineno);
        }
        lex.add(*category, std::move(phrase));
    }
    return lex;
}

CategoryLexicon CategoryLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open lexicon " + path.string());
    return parse(in);
}

void CategoryLexicon::add(Category category, std::string phrase) {
    phrase = to_lower(phrase);
    const auto same = [&](const Entry& e) { return e.phrase == phrase; };
    if (std::any_of(entries_.begin(), entries_.end(), same)) return;
    entries_.push_back(Entry{category, std::move(phrase)});
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) { return a.phrase.size() > b.phrase.size(); });
}

std::string CategoryLexicon::canonical_name(Category category, std::string_view phrase) {
    if (category == Category::EndotrachealTube) return std::string(kEndotrachealTube);
    return std::string(phrase);
}

std::vector<LexiconMatch> CategoryLexicon::find_all(std::string_view text) const {
    std::vector<LexiconMatch> out;
    const std::string lower = to_lower(text);
    std::size_t i = 0;
    while (i < lower.size()) {
        if (!is_alpha(lower[i]) || (i > 0 && is_alpha(lower[i - 1]))) {
            ++i;
            continue;
        }
        const Entry* hit = nullptr;
        for (const Entry& e : entries_) {
            if (lower.compare(i, e.phrase.size(), e.phrase) != 0) continue;
            const std::size_t after = i + e.phrase.size();
            if (after < lower.size() && is_alpha(lower[after])) continue;
            hit = &e;
            break;  // entries are longest first
        }
        if (hit == nullptr) {
            ++i;
            continue;
        }
        out.push_back(LexiconMatch{hit->category, hit->phrase, canonical_name(hit->category, hit->phrase),
                                   {i, i + hit->phrase.size()}});
        i += hit->phrase.size();
    }
    return out;
}

std::optional<Category> CategoryLexicon::category_of(std::string_view object_name) const {
    const std::string name = to_lower(object_name);
    if (name == kEndotrachealTube) return Category::EndotrachealTube;
    for (const Entry& e : entries_) {
        if (e.phrase == name) return e.category;
    }
    return std::nullopt;
}

std::vector<std::string> CategoryLexicon::phrases_for(std::string_view object_name) const {
    std::vector<std::string> out;
    const std::string name = to_lower(object_name);
    const auto category = category_of(name);
    if (category == Category::EndotrachealTube) {
        for (const Entry& e : entries_) {
            if (e.category == Category::EndotrachealTube) out.push_back(e.phrase);
        }
    }
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

}  // namespace chexfix
