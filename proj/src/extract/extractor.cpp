#include "chexfix/extractor.hpp"

#include <algorithm>
#include <array>

namespace chexfix {

namespace {

constexpr std::array<std::string_view, 16> kRegionWords = {
    "right", "left",    "upper",     "lower",       "middle",  "central", "apical", "basilar",
    "basal", "bilateral", "perihilar", "retrocardiac", "lateral", "medial",  "mid",    "hilar"};

constexpr std::array<std::string_view, 7> kRegionNouns = {"lung", "lobe", "zone", "base",
                                                         "apex", "hemithorax", "field"};

// Ordered most specific first.
constexpr std::array<std::string_view, 14> kTooLow = {
    "too low",       "low-lying",   "low lying",     "too distal",    "mainstem",
    "main stem",     "should be withdrawn", "could be withdrawn", "withdrawal", "retracted",
    "retraction",    "pulled back", "near the carina", "at the carina"};
constexpr std::array<std::string_view, 10> kTooHigh = {
    "too high",           "high-lying",         "high lying", "too proximal",   "should be advanced",
    "could be advanced",  "recommend advancing", "advancement", "in the pharynx", "above the thoracic inlet"};
constexpr std::array<std::string_view, 9> kIncorrect = {
    "incorrect", "malpositioned", "malposition", "suboptimal", "suboptimally",
    "reposition", "repositioning", "repositioned", "not in standard position"};
constexpr std::array<std::string_view, 18> kCorrect = {
    "correct",           "standard position",   "appropriate position", "appropriately positioned",
    "appropriate",       "appropriately",       "satisfactory",         "good position",
    "well positioned",   "well-positioned",     "in place",             "stable",
    "unchanged",         "in position",         "expected position",    "optimal position",
    "adequately positioned", "adequate position"};

template <std::size_t N>
bool any_phrase(std::string_view text, const std::array<std::string_view, N>& list) {
    return std::any_of(list.begin(), list.end(),
                       [&](std::string_view p) { return find_phrase(text, p) != std::string_view::npos; });
}

bool contains_word(const std::vector<Word>& ws, std::string_view w) {
    return std::any_of(ws.begin(), ws.end(), [&](const Word& x) { return x.lower == w; });
}

bool is_clause_break(char c) { return c == ',' || c == ';' || c == ':'; }

// Negation scope is the clause (delimited by , ; :) around the object phrase.
bool is_negated(std::string_view content, Span object, Category category) {
    std::size_t clause_start = object.start;
    while (clause_start > 0 && !is_clause_break(content[clause_start - 1])) --clause_start;
    std::size_t clause_end = object.end;
    while (clause_end < content.size() && !is_clause_break(content[clause_end])) ++clause_end;

    const auto before = words(content.substr(clause_start, object.start - clause_start));
    for (std::size_t k = 0; k < before.size(); ++k) {
        const std::string& w = before[k].lower;
        if (w == "without" || w == "removal") return true;
        if (w == "no") {
            const std::string next = k + 1 < before.size() ? before[k + 1].lower : std::string();
            if (next != "change" && next != "interval" && next != "significant") return true;
        }
    }
    const auto after = words(content.substr(object.end, clause_end - object.end));
    for (std::size_t k = 0; k < after.size(); ++k) {
        const std::string& w = after[k].lower;
        if (w == "removed" || w == "resolved") return true;
        if (w == "no" && k + 1 < after.size() && after[k + 1].lower == "longer") return true;
    }
    if (category == Category::EndotrachealTube) {
        const auto all = words(content);
        if (contains_word(all, "extubated") || contains_word(all, "extubation")) return true;
    }
    return false;
}

bool is_region_word(std::string_view w) {
    return std::find(kRegionWords.begin(), kRegionWords.end(), w) != kRegionWords.end();
}

std::optional<std::string> region_of(std::string_view content, Span object) {
    // Region words directly in front of the object: "right central opacity".
    const auto before = words(content.substr(0, object.start));
    std::vector<std::string> prefix;
    for (auto it = before.rbegin(); it != before.rend(); ++it) {
        const std::size_t gap_start = it->span.end;
        const std::size_t gap_end = (it == before.rbegin()) ? object.start : std::prev(it)->span.start;
        const std::string_view gap = content.substr(gap_start, gap_end - gap_start);
        if (gap.find_first_not_of(" \t-") != std::string_view::npos) break;
        if (!is_region_word(it->lower)) break;
        prefix.insert(prefix.begin(), it->lower);
    }
    if (!prefix.empty()) {
        std::string out = prefix.front();
        for (std::size_t k = 1; k < prefix.size(); ++k) out += " " + prefix[k];
        return out;
    }
    // Trailing location: "nodule in the right upper lung".
    const auto after = words(content.substr(object.end));
    std::size_t k = 0;
    if (k < after.size() && after[k].lower == "in") ++k;
    else return std::nullopt;
    if (k < after.size() && after[k].lower == "the") ++k;
    std::string region;
    while (k < after.size() && is_region_word(after[k].lower)) {
        region += (region.empty() ? "" : " ") + after[k].lower;
        ++k;
    }
    if (k < after.size() &&
        std::find(kRegionNouns.begin(), kRegionNouns.end(), after[k].lower) != kRegionNouns.end()) {
        region += (region.empty() ? "" : " ") + after[k].lower;
        return region;
    }
    return std::nullopt;
}

Placement most_specific(Placement a, Placement b) {
    const auto rank = [](Placement p) {
        switch (p) {
            case Placement::Correct: return 0;
            case Placement::IncorrectUnspecified: return 1;
            case Placement::TooLow:
            case Placement::TooHigh: return 2;
        }
        return 0;
    };
    if (rank(a) == 2 && rank(b) == 2 && a != b) return Placement::IncorrectUnspecified;
    return rank(b) > rank(a) ? b : a;
}

}  // namespace

std::optional<Placement> stated_placement(std::string_view text) {
    const bool low = any_phrase(text, kTooLow);
    const bool high = any_phrase(text, kTooHigh);
    if (low && high) return Placement::IncorrectUnspecified;
    if (low) return Placement::TooLow;
    if (high) return Placement::TooHigh;
    if (any_phrase(text, kIncorrect)) return Placement::IncorrectUnspecified;
    if (any_phrase(text, kCorrect)) return Placement::Correct;
    return std::nullopt;
}

bool SentenceAnalysis::mentions(Category c) const {
    return std::any_of(objects.begin(), objects.end(), [&](const LexiconMatch& m) { return m.category == c; });
}

bool SentenceAnalysis::mentions_positive(Category c) const {
    for (std::size_t k = 0; k < objects.size(); ++k) {
        if (objects[k].category == c && !object_negated[k]) return true;
    }
    return false;
}

bool SentenceAnalysis::mentions_negated(Category c) const {
    for (std::size_t k = 0; k < objects.size(); ++k) {
        if (objects[k].category == c && object_negated[k]) return true;
    }
    return false;
}

ReportAnalysis analyze_report(std::string_view report, const CategoryLexicon& lexicon) {
    ReportAnalysis out{report, {}};
    for (const Sentence& s : split_sentences(report)) {
        SentenceAnalysis sa;
        sa.sentence = s;
        const std::string_view content = s.content.of(report);
        const std::size_t base = s.content.start;
        sa.objects = lexicon.find_all(content);
        for (LexiconMatch& m : sa.objects) {
            sa.object_negated.push_back(is_negated(content, m.span, m.category));
            m.span.start += base;
            m.span.end += base;
        }
        sa.measurements = find_measurements(content);
        for (MeasurementMention& m : sa.measurements) {
            m.span.start += base;
            m.span.end += base;
        }
        sa.stated_placement = stated_placement(content);
        const auto ws = words(content);
        sa.mentions_extubation = contains_word(ws, "extubated") || contains_word(ws, "extubation");
        out.sentences.push_back(std::move(sa));
    }
    return out;
}

std::vector<MeasuredFinding> extract_measured_findings(std::string_view report,
                                                       const CategoryLexicon& lexicon) {
    std::vector<MeasuredFinding> out;
    const ReportAnalysis analysis = analyze_report(report, lexicon);
    for (const SentenceAnalysis& sa : analysis.sentences) {
        if (sa.objects.empty() || sa.measurements.empty()) continue;
        const std::string_view content = sa.sentence.content.of(report);
        const std::size_t base = sa.sentence.content.start;

        std::vector<std::string> names;
        for (const auto& o : sa.objects) {
            if (std::find(names.begin(), names.end(), o.object_name) == names.end()) names.push_back(o.object_name);
        }
        const bool multi = names.size() > 1;
        const bool mentions_carina = find_phrase(content, kCarina) != std::string_view::npos;

        std::vector<bool> taken(sa.objects.size(), false);
        for (const MeasurementMention& m : sa.measurements) {
            // Nearest preceding object; otherwise the nearest following one.
            std::optional<std::size_t> owner;
            for (std::size_t k = 0; k < sa.objects.size(); ++k) {
                if (sa.objects[k].span.end <= m.span.start) owner = k;
            }
            if (!owner) {
                for (std::size_t k = 0; k < sa.objects.size(); ++k) {
                    if (sa.objects[k].span.start >= m.span.end) {
                        owner = k;
                        break;
                    }
                }
            }
            if (!owner || taken[*owner]) continue;
            taken[*owner] = true;
            const LexiconMatch& obj = sa.objects[*owner];

            MeasuredFinding f;
            f.object_name = obj.object_name;
            f.category = obj.category;
            f.values_cm = m.values_cm;
            f.sentence_index = sa.sentence.index;
            f.char_span = m.span;
            f.object_span = obj.span;
            f.polarity = sa.object_negated[*owner] ? Polarity::Absent : Polarity::Present;
            f.region = region_of(content, {obj.span.start - base, obj.span.end - base});
            if (mentions_carina) f.reference = std::string(kCarina);
            f.below = m.below;
            f.multi_object = multi;
            out.push_back(std::move(f));
        }
    }
    return out;
}

std::vector<MeasuredFinding> extract_query_findings(std::string_view report, const CategoryLexicon& lexicon) {
    std::vector<MeasuredFinding> findings = extract_measured_findings(report, lexicon);
    const bool has_ett = std::any_of(findings.begin(), findings.end(), [](const MeasuredFinding& f) {
        return f.category == Category::EndotrachealTube && f.polarity == Polarity::Present;
    });
    if (has_ett || !extract_ett(report, lexicon).present) return findings;

    const ReportAnalysis analysis = analyze_report(report, lexicon);
    for (const SentenceAnalysis& sa : analysis.sentences) {
        for (std::size_t k = 0; k < sa.objects.size(); ++k) {
            if (sa.objects[k].category != Category::EndotrachealTube || sa.object_negated[k]) continue;
            MeasuredFinding f;
            f.object_name = std::string(kEndotrachealTube);
            f.category = Category::EndotrachealTube;
            f.sentence_index = sa.sentence.index;
            f.char_span = sa.objects[k].span;
            f.object_span = sa.objects[k].span;
            f.reference = std::string(kCarina);
            // Keep sentence order relative to the measured findings.
            const auto pos = std::find_if(findings.begin(), findings.end(), [&](const MeasuredFinding& g) {
                return g.sentence_index > f.sentence_index;
            });
            findings.insert(pos, std::move(f));
            return findings;
        }
    }
    return findings;
}

EttObservation extract_ett(std::string_view report, const CategoryLexicon& lexicon) {
    const ReportAnalysis analysis = analyze_report(report, lexicon);
    bool mentioned = false;
    bool withdrawn = false;
    for (const SentenceAnalysis& sa : analysis.sentences) {
        if (sa.mentions_extubation || sa.mentions_negated(Category::EndotrachealTube)) withdrawn = true;
        if (sa.mentions_positive(Category::EndotrachealTube)) mentioned = true;
    }
    EttObservation obs;
    if (!mentioned || withdrawn) return obs;
    obs.present = true;

    for (const MeasuredFinding& f : extract_measured_findings(report, lexicon)) {
        if (f.category == Category::EndotrachealTube && f.polarity == Polarity::Present) {
            obs.measurement_cm = f.below ? -f.values_cm.front() : f.values_cm.front();
            break;
        }
    }
    for (const SentenceAnalysis& sa : analysis.sentences) {
        if (!sa.mentions_positive(Category::EndotrachealTube) || !sa.stated_placement) continue;
        obs.placement = obs.placement ? most_specific(*obs.placement, *sa.stated_placement) : *sa.stated_placement;
    }
    return obs;
}

EttObservation extract_ett(std::string_view report) {
    static const CategoryLexicon lexicon = CategoryLexicon::defaults();
    return extract_ett(report, lexicon);
}

}  // namespace chexfix
