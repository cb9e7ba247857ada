#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chexfix/backend.hpp"
#include "chexfix/query.hpp"

namespace chexfix {

/// Index of an earlier step whose output a step consumes.
using StepRef = std::size_t;

namespace step {

struct Exists {
    std::string name;
};
struct Find {
    std::string name;
};
struct Segment {
    std::string name;
};
/// Ends the plan with NotPresent when any referenced output is empty.
struct GuardNonEmpty {
    std::vector<StepRef> refs;
};
/// Objects whose centre lies inside the region.
struct Filter {
    StepRef objects;
    StepRef region;
};
struct Within {
    StepRef object;
    StepRef region;
};
struct Distance {
    StepRef a;
    StepRef b;
};
struct Diameter {
    StepRef object;
};
struct Dimensions {
    StepRef object;
};
struct Width {
    StepRef segmentation;
};
struct Height {
    StepRef segmentation;
};

}  // namespace step

using PlanStep = std::variant<step::Exists, step::Find, step::Segment, step::GuardNonEmpty, step::Filter, step::Within,
                              step::Distance, step::Diameter, step::Dimensions, step::Width, step::Height>;

std::string render(const PlanStep& s);

struct Plan {
    MeasurementQuery query;
    std::vector<PlanStep> steps;

    /// Throws PlanError unless every ref points backward at a step of the
    /// right output type and the last step yields the query's result type.
    void validate() const;

    /// One line per step: `#0 find("carina")`.
    std::string render() const;
};

/// Compiles a query into its fixed plan shape. Throws UnsupportedQuery.
Plan compile(const MeasurementQuery& query);

namespace outcome {

struct Scalar {
    double cm;
};
struct Dims {
    double major_cm;
    double minor_cm;
};
struct NotPresent {
    std::string object_name;
};
struct Present {
    std::string object_name;
};
struct Failed {
    std::string message;
};

}  // namespace outcome

using Outcome = std::variant<outcome::Scalar, outcome::Dims, outcome::NotPresent, outcome::Present, outcome::Failed>;

/// "4.3 cm", "2.0 x 1.0 cm", "carina not present in the image.", ...
std::string describe(const Outcome& o);

struct ProvenanceEntry {
    std::size_t step = 0;
    std::string tool;
    std::optional<double> confidence;  // of the detection the step relied on
};

struct MeasurementResult {
    MeasurementQuery query;
    Outcome outcome;
    std::vector<ProvenanceEntry> provenance;
};

/// Runs plans for one study. Tool answers are cached by (operation, object
/// name), so queries sharing objects reuse detections. Not thread-safe:
/// use one executor per study.
class Executor {
public:
    /// `backend` should already be wrapped in a CheckedBackend.
    Executor(const StudyRecord& study, const ToolBackend& backend);

    /// Never throws for backend trouble: it becomes a Failed outcome.
    /// Throws PlanError for a malformed plan.
    MeasurementResult run(const Plan& plan);

    std::size_t backend_calls() const noexcept { return calls_; }

private:
    using Answer = std::variant<ExistsAnswer, std::vector<CxrObject>, CxrSegmentation>;

    const Answer& call(const std::string& op, const std::string& name);

    const StudyRecord& study_;
    const ToolBackend& backend_;
    ImageContext image_;
    std::map<std::pair<std::string, std::string>, Answer> cache_;
    std::size_t calls_ = 0;
};

MeasurementResult execute(const Plan& plan, const StudyRecord& study, const ToolBackend& backend);

/// The detection a singleton query uses: highest confidence, then the
/// smaller box, then the lexicographically smallest (left, lower, right, upper).
const CxrObject& select_singleton(const std::vector<CxrObject>& candidates);

}  // namespace chexfix
