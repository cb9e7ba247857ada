#include <atomic>

#include <gtest/gtest.h>

#include "chexfix/errors.hpp"
#include "chexfix/fixture_backend.hpp"
#include "chexfix/plan.hpp"

using namespace chexfix;

namespace {

MeasurementQuery query(QueryKind kind, std::string subject, std::optional<std::string> reference = std::nullopt,
                       std::optional<std::string> region = std::nullopt) {
    MeasurementQuery q;
    q.kind = kind;
    q.subject = std::move(subject);
    q.reference = std::move(reference);
    q.region = std::move(region);
    return q;
}

StudyRecord study(double spacing_mm, ImageSize size = {400, 400}) {
    StudyRecord s;
    s.study_id = "s1";
    s.original_size = size;
    s.pixel_spacing = {spacing_mm, spacing_mm};
    s.ground_truth_report = "x";
    return s;
}

// Counts calls and can be told to fail.
class ProbeBackend final : public ToolBackend {
public:
    explicit ProbeBackend(std::shared_ptr<const FixtureSet> set) : inner_(std::move(set)) {}

    std::string name() const override { return "probe"; }
    ExistsAnswer exists(const ImageContext& i, std::string_view n) const override {
        ++calls;
        check();
        return inner_.exists(i, n);
    }
    std::vector<CxrObject> find(const ImageContext& i, std::string_view n) const override {
        ++calls;
        check();
        return inner_.find(i, n);
    }
    CxrSegmentation segment(const ImageContext& i, std::string_view n) const override {
        ++calls;
        check();
        return inner_.segment(i, n);
    }

    mutable std::atomic<int> calls{0};
    bool fail = false;

private:
    void check() const {
        if (fail) throw BackendUnavailable("tool offline");
    }
    FixtureBackend inner_;
};

std::shared_ptr<FixtureSet> tube_fixture() {
    auto set = std::make_shared<FixtureSet>();
    set->add_object("s1", {"endotracheal tube", BBox::point(100, 200), 0.9});
    set->add_object("s1", {"carina", BBox::point(100, 260), 0.95});
    set->add_object("s1", {"nodule", {0, 0, 40, 20}, 0.8});
    return set;
}

}  // namespace

TEST(Compile, DistanceShape) {
    const Plan p = compile(query(QueryKind::DistanceBetween, "endotracheal tube", "carina"));
    EXPECT_EQ(p.render(),
              "#0 find(\"endotracheal tube\")\n"
              "#1 find(\"carina\")\n"
              "#2 guard_nonempty(#0, #1)\n"
              "#3 distance(#0, #1)\n");
}

TEST(Compile, DiameterWithAndWithoutRegion) {
    EXPECT_EQ(compile(query(QueryKind::DiameterOf, "nodule")).render(),
              "#0 find(\"nodule\")\n#1 guard_nonempty(#0)\n#2 diameter(#0)\n");
    EXPECT_EQ(compile(query(QueryKind::DimensionsOf, "nodule", std::nullopt, "right lung")).render(),
              "#0 find(\"nodule\")\n"
              "#1 segment(\"right lung\")\n"
              "#2 filter(#0, #1)\n"
              "#3 guard_nonempty(#0, #1, #2)\n"
              "#4 dimensions(#2)\n");
}

TEST(Compile, WidthHeightExistence) {
    EXPECT_EQ(compile(query(QueryKind::WidthOf, "pneumothorax")).render(),
              "#0 segment(\"pneumothorax\")\n#1 guard_nonempty(#0)\n#2 width(#0)\n");
    EXPECT_EQ(compile(query(QueryKind::HeightOf, "heart")).render(),
              "#0 segment(\"heart\")\n#1 guard_nonempty(#0)\n#2 height(#0)\n");
    EXPECT_EQ(compile(query(QueryKind::ExistenceOf, "carina")).render(), "#0 exists(\"carina\")\n");
}

TEST(Compile, RejectsInvalidQueries) {
    EXPECT_THROW(compile(query(QueryKind::DistanceBetween, "endotracheal tube")), UnsupportedQuery);
    EXPECT_THROW(compile(query(QueryKind::DiameterOf, "")), UnsupportedQuery);
}

TEST(PlanValidate, RejectsForwardRefsAndTypeMismatches) {
    Plan p;
    p.query = query(QueryKind::DiameterOf, "nodule");
    p.steps = {step::Diameter{0}};
    EXPECT_THROW(p.validate(), PlanError);
    p.steps = {step::Segment{"lung"}, step::Diameter{0}};
    EXPECT_THROW(p.validate(), PlanError);
    p.steps = {step::Find{"nodule"}, step::Dimensions{0}};
    EXPECT_THROW(p.validate(), PlanError);  // ends in dimensions, query wants a scalar
    p.steps = {step::Find{"nodule"}, step::Diameter{0}};
    EXPECT_NO_THROW(p.validate());
}

TEST(Executor, TubeToCarinaDistance) {
    const ProbeBackend backend(tube_fixture());
    const MeasurementResult r =
        execute(compile(query(QueryKind::DistanceBetween, "endotracheal tube", "carina")), study(0.5), backend);
    ASSERT_TRUE(std::holds_alternative<outcome::Scalar>(r.outcome)) << describe(r.outcome);
    EXPECT_DOUBLE_EQ(std::get<outcome::Scalar>(r.outcome).cm, 3.0);
    ASSERT_EQ(r.provenance.size(), 2u);
    EXPECT_EQ(r.provenance[0].tool, "probe");
    EXPECT_EQ(r.provenance[0].confidence, 0.9);
    EXPECT_EQ(r.provenance[1].confidence, 0.95);
}

TEST(Executor, DiameterAndDimensions) {
    const ProbeBackend backend(tube_fixture());
    const MeasurementResult d = execute(compile(query(QueryKind::DiameterOf, "nodule")), study(1.0), backend);
    EXPECT_DOUBLE_EQ(std::get<outcome::Scalar>(d.outcome).cm, 4.0);
    const MeasurementResult dims = execute(compile(query(QueryKind::DimensionsOf, "nodule")), study(1.0), backend);
    EXPECT_DOUBLE_EQ(std::get<outcome::Dims>(dims.outcome).major_cm, 4.0);
    EXPECT_DOUBLE_EQ(std::get<outcome::Dims>(dims.outcome).minor_cm, 2.0);
}

TEST(Executor, MissingObjectIsNotPresent) {
    auto set = std::make_shared<FixtureSet>();
    set->add_object("s1", {"carina", BBox::point(100, 260), 1.0});
    const ProbeBackend backend(set);
    const MeasurementResult r =
        execute(compile(query(QueryKind::DistanceBetween, "endotracheal tube", "carina")), study(0.5), backend);
    ASSERT_TRUE(std::holds_alternative<outcome::NotPresent>(r.outcome));
    EXPECT_EQ(std::get<outcome::NotPresent>(r.outcome).object_name, "endotracheal tube");
    EXPECT_EQ(describe(r.outcome), "endotracheal tube not present in the image.");
}

TEST(Executor, BackendTroubleBecomesFailed) {
    ProbeBackend backend(tube_fixture());
    backend.fail = true;
    const MeasurementResult r =
        execute(compile(query(QueryKind::DistanceBetween, "endotracheal tube", "carina")), study(0.5), backend);
    ASSERT_TRUE(std::holds_alternative<outcome::Failed>(r.outcome));
    EXPECT_NE(std::get<outcome::Failed>(r.outcome).message.find("tool offline"), std::string::npos);
}

TEST(Executor, MalformedPlanThrows) {
    const ProbeBackend backend(tube_fixture());
    Plan p;
    p.query = query(QueryKind::DiameterOf, "nodule");
    p.steps = {step::Diameter{0}};
    Executor ex(study(1.0), backend);
    EXPECT_THROW(ex.run(p), PlanError);
}

TEST(Executor, CachesToolCallsWithinAStudy) {
    const ProbeBackend backend(tube_fixture());
    Executor ex(study(0.5), backend);
    const Plan p = compile(query(QueryKind::DistanceBetween, "endotracheal tube", "carina"));
    ex.run(p);
    ex.run(p);
    ex.run(compile(query(QueryKind::ExistenceOf, "carina")));
    EXPECT_EQ(backend.calls.load(), 3);
    EXPECT_EQ(ex.backend_calls(), 3u);
}

TEST(Executor, ExistenceReportsPresence) {
    const ProbeBackend backend(tube_fixture());
    EXPECT_TRUE(std::holds_alternative<outcome::Present>(
        execute(compile(query(QueryKind::ExistenceOf, "carina")), study(1.0), backend).outcome));
    EXPECT_TRUE(std::holds_alternative<outcome::NotPresent>(
        execute(compile(query(QueryKind::ExistenceOf, "pacemaker")), study(1.0), backend).outcome));
}

TEST(Executor, RegionFilterAgreesWithWithin) {
    // Two nodules; only the one whose centre lies in the left half is inside the region.
    auto set = std::make_shared<FixtureSet>();
    set->add_object("s1", {"nodule", {10, 10, 30, 20}, 0.5});
    set->add_object("s1", {"nodule", {300, 300, 360, 340}, 0.9});
    std::vector<std::uint8_t> pixels(400 * 400, 0);
    for (int y = 0; y < 400; ++y) {
        for (int x = 0; x < 200; ++x) pixels[static_cast<std::size_t>(y) * 400 + x] = 1;
    }
    set->add_mask("s1", "left lung", RleMask::encode({400, 400}, pixels));
    const ProbeBackend backend(set);

    const MeasurementResult r =
        execute(compile(query(QueryKind::DiameterOf, "nodule", std::nullopt, "left lung")), study(1.0), backend);
    EXPECT_DOUBLE_EQ(std::get<outcome::Scalar>(r.outcome).cm, 2.0);

    Plan within;
    within.query = query(QueryKind::ExistenceOf, "nodule");
    within.steps = {step::Find{"nodule"}, step::Segment{"left lung"}, step::Filter{0, 1}, step::Within{2, 1}};
    EXPECT_TRUE(std::holds_alternative<outcome::Present>(execute(within, study(1.0), backend).outcome));

    const MeasurementResult outside =
        execute(compile(query(QueryKind::DiameterOf, "nodule", std::nullopt, "right lung")), study(1.0), backend);
    EXPECT_TRUE(std::holds_alternative<outcome::NotPresent>(outside.outcome));
}

TEST(SelectSingleton, ConfidenceThenAreaThenPosition) {
    const std::vector<CxrObject> c = {
        {"x", {0, 0, 10, 10}, 0.5},
        {"x", {5, 5, 10, 10}, 0.9},
        {"x", {0, 0, 5, 5}, 0.9},
    };
    EXPECT_EQ(select_singleton(c).bbox, (BBox{0, 0, 5, 5}));
    EXPECT_THROW(select_singleton({}), PlanError);
}
