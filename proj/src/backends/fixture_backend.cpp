#include "chexfix/fixture_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "chexfix/errors.hpp"
#include "chexfix/text.hpp"

namespace chexfix {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_real(const std::string& s, std::size_t line, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw IngestError(std::string("bad ") + what + " '" + s + "'", line);
    }
    if (used != s.size() || !std::isfinite(v)) throw IngestError(std::string("bad ") + what + " '" + s + "'", line);
    return v;
}

std::uint32_t parse_count(const std::string& s, std::size_t line) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return is_digit(c); })) {
        throw IngestError("bad run length '" + s + "'", line);
    }
    const unsigned long long v = std::stoull(s);
    if (v > 0xFFFFFFFFull) throw IngestError("run length too large", line);
    return static_cast<std::uint32_t>(v);
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const FixtureEntry* FixtureAnnotation::entry(std::string_view object_name) const {
    const auto it = entries.find(to_lower(object_name));
    return it == entries.end() ? nullptr : &it->second;
}

FixtureSet FixtureSet::parse(std::istream& in) {
    FixtureSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() < 4) throw IngestError("expected at least 4 tab-separated fields", lineno);
        const std::string& study = fields[0];
        const std::string name = to_lower(fields[1]);
        if (study.empty() || name.empty()) throw IngestError("empty study id or object name", lineno);

        if (fields[2] == "MASK") {
            if (fields.size() != 5) throw IngestError("mask record needs 5 fields", lineno);
            const auto dims = split(fields[3], ',');
            if (dims.size() != 2) throw IngestError("mask size must be w,h", lineno);
            const double w = parse_real(dims[0], lineno, "width");
            const double h = parse_real(dims[1], lineno, "height");
            if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) {
                throw IngestError("mask size must be positive integers", lineno);
            }
            std::string rle = fields[4];
            std::replace(rle.begin(), rle.end(), ',', ' ');
            std::istringstream tokens(rle);
            std::vector<std::uint32_t> counts;
            for (std::string tok; tokens >> tok;) counts.push_back(parse_count(tok, lineno));
            try {
                set.add_mask(study, name,
                             RleMask::from_zero_first({static_cast<int>(w), static_cast<int>(h)}, counts));
            } catch (const InvalidGeometry& e) {
                throw IngestError(e.what(), lineno);
            }
            continue;
        }

        if (fields.size() != 4) throw IngestError("box record needs 4 fields", lineno);
        const auto coords = split(fields[2], ',');
        if (coords.size() != 4) throw IngestError("box must be l,lo,r,u", lineno);
        CxrObject obj;
        obj.object_name = name;
        obj.bbox = {parse_real(coords[0], lineno, "coordinate"), parse_real(coords[1], lineno, "coordinate"),
                    parse_real(coords[2], lineno, "coordinate"), parse_real(coords[3], lineno, "coordinate")};
        obj.confidence = parse_real(fields[3], lineno, "confidence");
        const BBox& b = obj.bbox;
        if (b.left < 0 || b.lower < 0) throw IngestError("negative coordinate", lineno);
        if (b.left > b.right || b.lower > b.upper) throw IngestError("box edges out of order", lineno);
        if (obj.confidence < 0.0 || obj.confidence > 1.0) throw IngestError("confidence outside [0,1]", lineno);
        set.add_object(study, std::move(obj));
    }
    return set;
}

FixtureSet FixtureSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open fixtures " + path.string());
    return parse(in);
}

void FixtureSet::add_object(const std::string& study_id, CxrObject object) {
    auto& ann = studies_[study_id];
    ann.study_id = study_id;
    object.object_name = to_lower(object.object_name);
    ann.entries[object.object_name].objects.push_back(std::move(object));
}

void FixtureSet::add_mask(const std::string& study_id, const std::string& object_name, RleMask mask) {
    auto& ann = studies_[study_id];
    ann.study_id = study_id;
    ann.entries[to_lower(object_name)].mask = std::move(mask);
}

const FixtureAnnotation* FixtureSet::study(std::string_view study_id) const {
    const auto it = studies_.find(study_id);
    return it == studies_.end() ? nullptr : &it->second;
}

void FixtureSet::write(std::ostream& out) const {
    for (const auto& [study, ann] : studies_) {
        for (const auto& [name, entry] : ann.entries) {
            for (const CxrObject& o : entry.objects) {
                out << study << '\t' << name << '\t' << fmt_real(o.bbox.left) << ',' << fmt_real(o.bbox.lower) << ','
                    << fmt_real(o.bbox.right) << ',' << fmt_real(o.bbox.upper) << '\t' << fmt_real(o.confidence)
                    << '\n';
            }
            if (entry.mask) {
                out << study << '\t' << name << "\tMASK\t" << entry.mask->size().width << ','
                    << entry.mask->size().height << '\t';
                const auto counts = entry.mask->to_zero_first();
                for (std::size_t i = 0; i < counts.size(); ++i) out << (i ? " " : "") << counts[i];
                out << '\n';
            }
        }
    }
}

RleMask rasterize(const BBox& box, ImageSize size) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(size.width) * size.height, 0);
    const auto clamp_x = [&](double v) { return std::clamp(static_cast<int>(v), 0, size.width); };
    const auto clamp_y = [&](double v) { return std::clamp(static_cast<int>(v), 0, size.height); };
    int x0 = clamp_x(std::floor(box.left));
    int y0 = clamp_y(std::floor(box.lower));
    int x1 = clamp_x(std::ceil(box.right));
    int y1 = clamp_y(std::ceil(box.upper));
    if (x1 == x0) x1 = std::min(size.width, x0 + 1), x0 = std::min(x0, size.width - 1);
    if (y1 == y0) y1 = std::min(size.height, y0 + 1), y0 = std::min(y0, size.height - 1);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) px[static_cast<std::size_t>(y) * size.width + x] = 1;
    }
    return RleMask::encode(size, px);
}

FixtureBackend::FixtureBackend(std::shared_ptr<const FixtureSet> fixtures, std::string name)
    : fixtures_(std::move(fixtures)), name_(std::move(name)) {
    if (!fixtures_) throw ConfigError("fixture backend needs a fixture set");
}

std::vector<CxrObject> FixtureBackend::find(const ImageContext& image, std::string_view object_name) const {
    const FixtureAnnotation* ann = fixtures_->study(image.image_id);
    if (ann == nullptr) return {};
    const FixtureEntry* entry = ann->entry(object_name);
    if (entry == nullptr) return {};
    if (!entry->objects.empty()) return entry->objects;
    if (entry->mask) {
        const RleMask mask = entry->mask->resample(image.original_size);
        if (auto box = mask.bounding_box()) return {CxrObject{to_lower(object_name), *box, 1.0}};
    }
    return {};
}

ExistsAnswer FixtureBackend::exists(const ImageContext& image, std::string_view object_name) const {
    ExistsAnswer a;
    for (const CxrObject& o : find(image, object_name)) {
        a.exists = true;
        a.confidence = std::max(a.confidence, o.confidence);
    }
    return a;
}

CxrSegmentation FixtureBackend::segment(const ImageContext& image, std::string_view object_name) const {
    CxrSegmentation seg{to_lower(object_name), RleMask(image.original_size)};
    const FixtureAnnotation* ann = fixtures_->study(image.image_id);
    const FixtureEntry* entry = ann ? ann->entry(object_name) : nullptr;
    if (entry == nullptr) return seg;
    if (entry->mask) {
        seg.mask = entry->mask->resample(image.original_size);
        return seg;
    }
    std::vector<std::uint8_t> px(static_cast<std::size_t>(image.original_size.width) * image.original_size.height, 0);
    for (const CxrObject& o : entry->objects) {
        const auto part = rasterize(o.bbox, image.original_size).decode();
        for (std::size_t i = 0; i < px.size(); ++i) px[i] |= part[i];
    }
    seg.mask = RleMask::encode(image.original_size, px);
    return seg;
}

std::shared_ptr<const ToolBackend> fixture_backend(const std::filesystem::path& path) {
    return std::make_shared<FixtureBackend>(std::make_shared<const FixtureSet>(FixtureSet::load(path)));
}

}  // namespace chexfix
