#include <algorithm>
#include <cstdio>
#include <sstream>

#include "chexfix/metrics.hpp"

namespace chexfix {

namespace {

struct Group {
    std::string title;
    std::size_t columns;
};

struct Table {
    std::vector<Group> groups;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t footer_rows = 0;  // trailing summary rows, set apart in text output
};

std::string number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    // Never print a negative zero.
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

std::string number(const std::optional<double>& v, int digits) { return v ? number(*v, digits) : "n/a"; }

std::string percent(const std::optional<double>& v) { return v ? number(*v, 0) + "%" : "n/a"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string md_field(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

std::string qualified(const Table& t, std::size_t column) {
    std::size_t first = 0;
    for (const Group& g : t.groups) {
        if (column < first + g.columns) return g.title.empty() ? t.header[column] : g.title + " " + t.header[column];
        first += g.columns;
    }
    return t.header[column];
}

std::string render_csv(const Table& t) {
    std::ostringstream out;
    for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << csv_field(qualified(t, c));
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
        out << '\n';
    }
    return out.str();
}

std::string render_markdown(const Table& t) {
    std::ostringstream out;
    out << '|';
    for (std::size_t c = 0; c < t.header.size(); ++c) out << ' ' << md_field(qualified(t, c)) << " |";
    out << "\n|";
    for (std::size_t c = 0; c < t.header.size(); ++c) out << (c == 0 ? " --- |" : " ---: |");
    out << '\n';
    for (const auto& row : t.rows) {
        out << '|';
        for (const auto& cell : row) out << ' ' << md_field(cell) << " |";
        out << '\n';
    }
    return out.str();
}

std::string pad(const std::string& s, std::size_t width, bool right) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

std::string render_text(const Table& t) {
    const std::size_t ncols = t.header.size();
    std::vector<std::size_t> width(ncols, 0);
    for (std::size_t c = 0; c < ncols; ++c) {
        width[c] = t.header[c].size();
        for (const auto& row : t.rows) width[c] = std::max(width[c], row[c].size());
    }
    constexpr std::size_t kGap = 2;
    // Widen the last column of a group whose title is wider than its columns.
    std::size_t first = 0;
    for (const Group& g : t.groups) {
        std::size_t span = 0;
        for (std::size_t c = first; c < first + g.columns; ++c) span += width[c] + (c > first ? kGap : 0);
        if (g.title.size() > span) width[first + g.columns - 1] += g.title.size() - span;
        first += g.columns;
    }

    std::ostringstream out;
    const auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c) s += std::string(kGap, ' ');
            s += pad(cells[c], width[c], c != 0);
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << '\n';
    };

    if (!t.groups.empty()) {
        std::string s;
        first = 0;
        for (std::size_t gi = 0; gi < t.groups.size(); ++gi) {
            const Group& g = t.groups[gi];
            std::size_t span = 0;
            for (std::size_t c = first; c < first + g.columns; ++c) span += width[c] + (c > first ? kGap : 0);
            if (gi) s += std::string(kGap, ' ');
            s += pad(g.title, span, false);
            first += g.columns;
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << '\n';
    }
    line(t.header);
    std::size_t total = 0;
    for (std::size_t c = 0; c < ncols; ++c) total += width[c] + (c ? kGap : 0);
    out << std::string(total, '-') << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.footer_rows > 0 && r + t.footer_rows == t.rows.size()) out << std::string(total, '-') << '\n';
        line(t.rows[r]);
    }
    return out.str();
}

void comparison_row(Table& t, const Comparison& c) {
    t.rows.push_back({
        c.model,
        number(c.original.presence.precision, 2),
        number(c.updated.presence.precision, 2),
        number(c.original.measurement.mae, 2),
        number(c.updated.measurement.mae, 2),
        percent(c.mae_improvement),
        number(c.original.composite, 2),
        number(c.updated.composite, 2),
        percent(c.composite_improvement),
        number(c.original.placement.precision, 2),
        number(c.updated.placement.precision, 2),
    });
}

Table comparison_table(const Summary& s) {
    Table t;
    t.groups = {{"", 1}, {"Presence", 2}, {"Measurement", 6}, {"Placement", 2}};
    t.header = {"Model",    "P orig",   "P upd",    "MAE orig", "MAE upd", "MAE impr",
                "Comp orig", "Comp upd", "Comp impr", "P orig",   "P upd"};
    for (const Comparison& c : s.rows) comparison_row(t, c);
    comparison_row(t, s.average);
    t.footer_rows = 1;
    return t;
}

void detailed_row(Table& t, const std::string& model, const char* version, const MetricsTable& m) {
    t.rows.push_back({
        model,
        version,
        number(m.presence.precision, 2),
        number(m.presence.recall, 2),
        number(m.presence.f1, 2),
        number(m.presence.bacc, 2),
        std::to_string(m.measurement.n),
        number(m.measurement.mae, 2),
        number(m.measurement.mse, 2),
        number(m.measurement.max, 2),
        number(m.measurement.min, 2),
        number(m.measurement.avg, 2),
        number(m.measurement.std, 2),
        number(m.composite, 2),
        number(m.failure_rate, 2),
        number(m.placement.precision, 2),
        number(m.placement.recall, 2),
        number(m.placement.f1, 2),
        number(m.placement.bacc, 2),
    });
}

Table detailed_table(const Summary& s) {
    Table t;
    t.groups = {{"", 2}, {"Presence", 4}, {"Measurement", 9}, {"Placement", 4}};
    t.header = {"Model", "Report", "P",   "R",    "F1",      "BACC", "N", "MAE", "MSE", "Max",
                "Min",   "Avg",    "Std", "Comp", "Fail>1.5", "P",    "R", "F1",  "BACC"};
    const auto both = [&](const Comparison& c) {
        detailed_row(t, c.model, "original", c.original);
        detailed_row(t, c.model, "updated", c.updated);
    };
    for (const Comparison& c : s.rows) both(c);
    both(s.average);
    t.footer_rows = 2;
    return t;
}

}  // namespace

std::optional<TableFormat> table_format_from_string(std::string_view s) noexcept {
    if (s == "csv") return TableFormat::Csv;
    if (s == "md") return TableFormat::Markdown;
    if (s == "txt") return TableFormat::Text;
    return std::nullopt;
}

std::string render(const Summary& summary, TableFormat format, TableLayout layout) {
    const Table t = layout == TableLayout::Comparison ? comparison_table(summary) : detailed_table(summary);
    switch (format) {
        case TableFormat::Csv: return render_csv(t);
        case TableFormat::Markdown: return render_markdown(t);
        case TableFormat::Text: return render_text(t);
    }
    return render_text(t);
}

}  // namespace chexfix
