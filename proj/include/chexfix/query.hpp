#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/extractor.hpp"

namespace chexfix {

enum class QueryKind { DistanceBetween, DiameterOf, DimensionsOf, WidthOf, HeightOf, ExistenceOf };

std::string_view to_string(QueryKind k) noexcept;

struct MeasurementQuery {
    QueryKind kind = QueryKind::ExistenceOf;
    std::string subject;
    std::optional<std::string> reference;  // required for DistanceBetween
    std::optional<std::string> region;
    // Index into the findings the query was generated from.
    std::optional<std::size_t> source_finding;

    /// Throws UnsupportedQuery when the invariants do not hold.
    void validate() const;

    /// "measure the distance between the endotracheal tube and the carina".
    std::string describe() const;

    friend bool operator==(const MeasurementQuery&, const MeasurementQuery&) = default;
};

struct QueryOptions {
    // Only the endotracheal tube is queried unless enabled.
    bool allow_non_ett = false;
};

/// One query per present finding, in finding order. Absent findings, and
/// categories without a measurement route, produce nothing.
std::vector<MeasurementQuery> generate_queries(const std::vector<MeasuredFinding>& findings,
                                               const QueryOptions& options = {});

}  // namespace chexfix
