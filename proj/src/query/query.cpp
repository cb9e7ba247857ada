#include "chexfix/query.hpp"

#include "chexfix/errors.hpp"

namespace chexfix {

std::string_view to_string(QueryKind k) noexcept {
    switch (k) {
        case QueryKind::DistanceBetween: return "distance_between";
        case QueryKind::DiameterOf: return "diameter_of";
        case QueryKind::DimensionsOf: return "dimensions_of";
        case QueryKind::WidthOf: return "width_of";
        case QueryKind::HeightOf: return "height_of";
        case QueryKind::ExistenceOf: return "existence_of";
    }
    return "unknown";
}

void MeasurementQuery::validate() const {
    if (subject.empty()) throw UnsupportedQuery("query subject is empty");
    if ((kind == QueryKind::DistanceBetween) != reference.has_value()) {
        throw UnsupportedQuery("a reference object is required exactly for distance queries");
    }
    if (reference && reference->empty()) throw UnsupportedQuery("query reference is empty");
    if (region && region->empty()) throw UnsupportedQuery("query region is empty");
}

std::string MeasurementQuery::describe() const {
    const std::string where = region ? " in the " + *region : "";
    switch (kind) {
        case QueryKind::DistanceBetween:
            return "measure the distance between the " + subject + " and the " + reference.value_or("?");
        case QueryKind::DiameterOf: return "measure the diameter of the " + subject + where;
        case QueryKind::DimensionsOf: return "measure the dimensions of the " + subject + where;
        case QueryKind::WidthOf: return "measure the width of the " + subject + where;
        case QueryKind::HeightOf: return "measure the height of the " + subject + where;
        case QueryKind::ExistenceOf: return "is there a " + subject + where + " in the image";
    }
    return subject;
}

std::vector<MeasurementQuery> generate_queries(const std::vector<MeasuredFinding>& findings,
                                               const QueryOptions& options) {
    std::vector<MeasurementQuery> out;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        const MeasuredFinding& f = findings[i];
        if (f.polarity == Polarity::Absent) continue;
        if (f.category != Category::EndotrachealTube && !options.allow_non_ett) continue;

        MeasurementQuery q;
        q.subject = f.object_name;
        q.source_finding = i;
        switch (f.category) {
            case Category::EndotrachealTube:
                q.kind = QueryKind::DistanceBetween;
                q.subject = std::string(kEndotrachealTube);
                q.reference = std::string(kCarina);
                break;
            case Category::Lesion:
                if (f.values_cm.empty()) continue;
                q.kind = f.values_cm.size() >= 2 ? QueryKind::DimensionsOf : QueryKind::DiameterOf;
                q.region = f.region;
                break;
            case Category::Pneumothorax:
                if (f.values_cm.empty()) continue;
                q.kind = f.region ? QueryKind::WidthOf : QueryKind::DiameterOf;
                q.region = f.region;
                break;
            case Category::OtherTubeCatheter:
                // Tubes are measured against the landmark their sentence names.
                if (f.values_cm.empty() || !f.reference) continue;
                q.kind = QueryKind::DistanceBetween;
                q.reference = f.reference;
                break;
            case Category::Other:
                continue;
        }
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace chexfix
