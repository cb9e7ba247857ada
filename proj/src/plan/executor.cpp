#include <algorithm>
#include <cmath>
#include <tuple>

#include "chexfix/errors.hpp"
#include "chexfix/geometry.hpp"
#include "chexfix/plan.hpp"

namespace chexfix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Objects {
    std::vector<CxrObject> items;
    std::string name;  // what was looked for, for NotPresent
};

struct Region {
    CxrSegmentation segmentation;
};

using Value = std::variant<std::monostate, bool, Objects, Region, double, outcome::Dims>;

// Raised inside a run to stop at a failed guard.
struct Absent {
    std::string name;
};

double width_cm(const BBox& b, PixelSpacing s) { return b.width() * s.x_mm / 10.0; }
double height_cm(const BBox& b, PixelSpacing s) { return b.height() * s.y_mm / 10.0; }

}  // namespace

const CxrObject& select_singleton(const std::vector<CxrObject>& candidates) {
    if (candidates.empty()) throw PlanError("no candidate to select");
    const auto better = [](const CxrObject& a, const CxrObject& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.bbox.area() != b.bbox.area()) return a.bbox.area() < b.bbox.area();
        return std::tie(a.bbox.left, a.bbox.lower, a.bbox.right, a.bbox.upper) <
               std::tie(b.bbox.left, b.bbox.lower, b.bbox.right, b.bbox.upper);
    };
    return *std::min_element(candidates.begin(), candidates.end(), better);
}

Executor::Executor(const StudyRecord& study, const ToolBackend& backend)
    : study_(study), backend_(backend), image_(ImageContext::of(study)) {}

const Executor::Answer& Executor::call(const std::string& op, const std::string& name) {
    const auto key = std::make_pair(op, name);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    ++calls_;
    Answer a;
    if (op == "exists") {
        a = backend_.exists(image_, name);
    } else if (op == "find") {
        a = backend_.find(image_, name);
    } else {
        a = backend_.segment(image_, name);
    }
    return cache_.emplace(key, std::move(a)).first->second;
}

MeasurementResult Executor::run(const Plan& plan) {
    plan.validate();
    MeasurementResult result;
    result.query = plan.query;
    const PixelSpacing spacing = study_.pixel_spacing;
    std::vector<Value> values(plan.steps.size());

    const auto objects = [&](StepRef r) -> const Objects& { return std::get<Objects>(values[r]); };
    const auto region = [&](StepRef r) -> const CxrSegmentation& { return std::get<Region>(values[r]).segmentation; };
    const auto single = [&](StepRef r) -> const CxrObject& {
        const Objects& o = objects(r);
        if (o.items.empty()) throw Absent{o.name};
        return select_singleton(o.items);
    };

    try {
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            values[i] = std::visit(
                overloaded{
                    [&](const step::Exists& x) -> Value {
                        const auto& a = std::get<ExistsAnswer>(call("exists", x.name));
                        result.provenance.push_back({i, backend_.tool_for(x.name), a.confidence});
                        return a.exists;
                    },
                    [&](const step::Find& x) -> Value {
                        const auto& found = std::get<std::vector<CxrObject>>(call("find", x.name));
                        std::optional<double> conf;
                        if (!found.empty()) conf = select_singleton(found).confidence;
                        result.provenance.push_back({i, backend_.tool_for(x.name), conf});
                        return Objects{found, x.name};
                    },
                    [&](const step::Segment& x) -> Value {
                        const auto& seg = std::get<CxrSegmentation>(call("segment", x.name));
                        result.provenance.push_back({i, backend_.tool_for(x.name), std::nullopt});
                        return Region{seg};
                    },
                    [&](const step::GuardNonEmpty& x) -> Value {
                        for (StepRef r : x.refs) {
                            if (const auto* o = std::get_if<Objects>(&values[r]); o && o->items.empty()) {
                                throw Absent{o->name};
                            }
                            if (const auto* g = std::get_if<Region>(&values[r]); g && g->segmentation.mask.empty()) {
                                throw Absent{g->segmentation.object_name};
                            }
                        }
                        return std::monostate{};
                    },
                    [&](const step::Filter& x) -> Value {
                        const Objects& src = objects(x.objects);
                        const CxrSegmentation& seg = region(x.region);
                        Objects out{{}, src.name};
                        for (const CxrObject& o : src.items) {
                            if (seg.contains(o.bbox.center())) out.items.push_back(o);
                        }
                        return out;
                    },
                    [&](const step::Within& x) -> Value {
                        return region(x.region).contains(single(x.object).bbox.center());
                    },
                    [&](const step::Distance& x) -> Value {
                        return center_distance_cm(single(x.a).bbox.center(), single(x.b).bbox.center(), spacing);
                    },
                    [&](const step::Diameter& x) -> Value {
                        const BBox& b = single(x.object).bbox;
                        return std::max(width_cm(b, spacing), height_cm(b, spacing));
                    },
                    [&](const step::Dimensions& x) -> Value {
                        const BBox& b = single(x.object).bbox;
                        const double w = width_cm(b, spacing), h = height_cm(b, spacing);
                        return outcome::Dims{std::max(w, h), std::min(w, h)};
                    },
                    [&](const step::Width& x) -> Value {
                        return region(x.segmentation).mask.pixel_width() * spacing.x_mm / 10.0;
                    },
                    [&](const step::Height& x) -> Value {
                        return region(x.segmentation).mask.pixel_height() * spacing.y_mm / 10.0;
                    },
                },
                plan.steps[i]);
        }
        const Value& last = values.back();
        if (const auto* d = std::get_if<double>(&last)) {
            result.outcome = outcome::Scalar{*d};
        } else if (const auto* dims = std::get_if<outcome::Dims>(&last)) {
            result.outcome = *dims;
        } else if (const auto* flag = std::get_if<bool>(&last)) {
            if (*flag) {
                result.outcome = outcome::Present{plan.query.subject};
            } else {
                result.outcome = outcome::NotPresent{plan.query.subject};
            }
        } else {
            throw PlanError("plan ended without a result");
        }
    } catch (const Absent& a) {
        result.outcome = outcome::NotPresent{a.name};
    } catch (const PlanError&) {
        throw;
    } catch (const std::exception& e) {
        result.outcome = outcome::Failed{e.what()};
    }
    return result;
}

MeasurementResult execute(const Plan& plan, const StudyRecord& study, const ToolBackend& backend) {
    Executor executor(study, backend);
    return executor.run(plan);
}

}  // namespace chexfix
