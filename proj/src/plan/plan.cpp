#include "chexfix/plan.hpp"

#include <cstdio>
#include <sstream>

#include "chexfix/errors.hpp"
#include "chexfix/geometry.hpp"

namespace chexfix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class Output { Flag, Objects, Segmentation, Nothing, Scalar, Dims };

const char* to_string(Output o) {
    switch (o) {
        case Output::Flag: return "flag";
        case Output::Objects: return "objects";
        case Output::Segmentation: return "segmentation";
        case Output::Nothing: return "nothing";
        case Output::Scalar: return "scalar";
        case Output::Dims: return "dimensions";
    }
    return "?";
}

Output output_of(const PlanStep& s) {
    return std::visit(overloaded{
                          [](const step::Exists&) { return Output::Flag; },
                          [](const step::Find&) { return Output::Objects; },
                          [](const step::Segment&) { return Output::Segmentation; },
                          [](const step::GuardNonEmpty&) { return Output::Nothing; },
                          [](const step::Filter&) { return Output::Objects; },
                          [](const step::Within&) { return Output::Flag; },
                          [](const step::Distance&) { return Output::Scalar; },
                          [](const step::Diameter&) { return Output::Scalar; },
                          [](const step::Dimensions&) { return Output::Dims; },
                          [](const step::Width&) { return Output::Scalar; },
                          [](const step::Height&) { return Output::Scalar; },
                      },
                      s);
}

std::string ref(StepRef r) { return "#" + std::to_string(r); }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string render(const PlanStep& s) {
    return std::visit(overloaded{
                          [](const step::Exists& x) { return "exists(" + quoted(x.name) + ")"; },
                          [](const step::Find& x) { return "find(" + quoted(x.name) + ")"; },
                          [](const step::Segment& x) { return "segment(" + quoted(x.name) + ")"; },
                          [](const step::GuardNonEmpty& x) {
                              std::string out = "guard_nonempty(";
                              for (std::size_t i = 0; i < x.refs.size(); ++i) out += (i ? ", " : "") + ref(x.refs[i]);
                              return out + ")";
                          },
                          [](const step::Filter& x) { return "filter(" + ref(x.objects) + ", " + ref(x.region) + ")"; },
                          [](const step::Within& x) { return "within(" + ref(x.object) + ", " + ref(x.region) + ")"; },
                          [](const step::Distance& x) { return "distance(" + ref(x.a) + ", " + ref(x.b) + ")"; },
                          [](const step::Diameter& x) { return "diameter(" + ref(x.object) + ")"; },
                          [](const step::Dimensions& x) { return "dimensions(" + ref(x.object) + ")"; },
                          [](const step::Width& x) { return "width(" + ref(x.segmentation) + ")"; },
                          [](const step::Height& x) { return "height(" + ref(x.segmentation) + ")"; },
                      },
                      s);
}

void Plan::validate() const {
    if (steps.empty()) throw PlanError("plan has no steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto expect = [&](StepRef r, std::initializer_list<Output> allowed) {
            if (r >= i) throw PlanError("step " + ref(i) + " refers forward to " + ref(r));
            const Output got = output_of(steps[r]);
            for (Output a : allowed) {
                if (got == a) return;
            }
            throw PlanError("step " + ref(i) + " cannot consume " + to_string(got) + " from " + ref(r));
        };
        std::visit(overloaded{
                       [&](const step::Exists& x) {
                           if (x.name.empty()) throw PlanError("exists needs an object name");
                       },
                       [&](const step::Find& x) {
                           if (x.name.empty()) throw PlanError("find needs an object name");
                       },
                       [&](const step::Segment& x) {
                           if (x.name.empty()) throw PlanError("segment needs an object name");
                       },
                       [&](const step::GuardNonEmpty& x) {
                           if (x.refs.empty()) throw PlanError("guard without refs");
                           for (StepRef r : x.refs) expect(r, {Output::Objects, Output::Segmentation});
                       },
                       [&](const step::Filter& x) {
                           expect(x.objects, {Output::Objects});
                           expect(x.region, {Output::Segmentation});
                       },
                       [&](const step::Within& x) {
                           expect(x.object, {Output::Objects});
                           expect(x.region, {Output::Segmentation});
                       },
                       [&](const step::Distance& x) {
                           expect(x.a, {Output::Objects});
                           expect(x.b, {Output::Objects});
                       },
                       [&](const step::Diameter& x) { expect(x.object, {Output::Objects}); },
                       [&](const step::Dimensions& x) { expect(x.object, {Output::Objects}); },
                       [&](const step::Width& x) { expect(x.segmentation, {Output::Segmentation}); },
                       [&](const step::Height& x) { expect(x.segmentation, {Output::Segmentation}); },
                   },
                   steps[i]);
    }
    const Output last = output_of(steps.back());
    const Output wanted = query.kind == QueryKind::ExistenceOf    ? Output::Flag
                          : query.kind == QueryKind::DimensionsOf ? Output::Dims
                                                                  : Output::Scalar;
    if (last != wanted) {
        throw PlanError(std::string("plan for ") + std::string(chexfix::to_string(query.kind)) + " ends in " +
                        to_string(last) + ", expected " + to_string(wanted));
    }
}

std::string Plan::render() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < steps.size(); ++i) out << ref(i) << ' ' << chexfix::render(steps[i]) << '\n';
    return out.str();
}

Plan compile(const MeasurementQuery& query) {
    query.validate();
    Plan plan;
    plan.query = query;
    auto& s = plan.steps;
    const std::string& x = query.subject;

    // Find the subject, optionally restricted to a region; returns the ref
    // holding the candidate objects.
    const auto located = [&]() -> StepRef {
        s.push_back(step::Find{x});
        if (!query.region) {
            s.push_back(step::GuardNonEmpty{{0}});
            return 0;
        }
        s.push_back(step::Segment{*query.region});
        s.push_back(step::Filter{0, 1});
        s.push_back(step::GuardNonEmpty{{0, 1, 2}});
        return 2;
    };

    switch (query.kind) {
        case QueryKind::DistanceBetween:
            s.push_back(step::Find{x});
            s.push_back(step::Find{*query.reference});
            s.push_back(step::GuardNonEmpty{{0, 1}});
            s.push_back(step::Distance{0, 1});
            break;
        case QueryKind::DiameterOf: {
            const StepRef r = located();
            s.push_back(step::Diameter{r});
            break;
        }
        case QueryKind::DimensionsOf: {
            const StepRef r = located();
            s.push_back(step::Dimensions{r});
            break;
        }
        case QueryKind::WidthOf:
            s.push_back(step::Segment{x});
            s.push_back(step::GuardNonEmpty{{0}});
            s.push_back(step::Width{0});
            break;
        case QueryKind::HeightOf:
            s.push_back(step::Segment{x});
            s.push_back(step::GuardNonEmpty{{0}});
            s.push_back(step::Height{0});
            break;
        case QueryKind::ExistenceOf:
            s.push_back(step::Exists{x});
            break;
        default:
            throw UnsupportedQuery("no plan for query kind " + std::to_string(static_cast<int>(query.kind)));
    }
    plan.validate();
    return plan;
}

std::string describe(const Outcome& o) {
    return std::visit(overloaded{
                          [](const outcome::Scalar& v) { return format_cm(v.cm) + " cm"; },
                          [](const outcome::Dims& v) {
                              return format_cm(v.major_cm) + " x " + format_cm(v.minor_cm) + " cm";
                          },
                          [](const outcome::NotPresent& v) { return v.object_name + " not present in the image."; },
                          [](const outcome::Present& v) { return v.object_name + " present in the image."; },
                          [](const outcome::Failed& v) { return "failed: " + v.message; },
                      },
                      o);
}

}  // namespace chexfix
