#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "shapegate/pipeline.hpp"

namespace {

using namespace shapegate;
using namespace shapegate::shapes;

struct Reading {
  std::int64_t id{};
  std::vector<double> values{};
};
SHAPEGATE_RECORD(Reading, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(values));

struct ReadingOut {
  std::vector<double> Values{};
  std::int64_t Id{};
};
SHAPEGATE_RECORD(ReadingOut, SHAPEGATE_FIELD(Values), SHAPEGATE_FIELD(Id));

struct Signup {
  std::int64_t id{};
  std::string email{};
  std::string campaign{};
};
SHAPEGATE_RECORD(Signup, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(email), SHAPEGATE_FIELD(campaign));

struct Mailing {
  std::int64_t id{};
  std::string email{};
  std::optional<std::string> nick{};
};
SHAPEGATE_RECORD(Mailing, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(email), SHAPEGATE_DEFAULTED(nick));

struct Slim {
  std::int64_t id{};
};
SHAPEGATE_RECORD(Slim, SHAPEGATE_FIELD(id));

struct Wide {
  std::int64_t id{};
  std::string note{};
};
SHAPEGATE_RECORD(Wide, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(note));

using Empty = PipelineBuilder<>;
using Sourced = PipelineBuilder<phase::HasSource, Reading>;

template <class B>
concept CanTransform = requires(B b, TransformFn f, ShapeNode s) { b.transform(f, s); };
template <class B>
concept CanTypedSink = requires(B b, Writer w) { b.template add_sink<ReadingOut, SchemaPolicy::Exact>(w); };
template <class B>
concept CanRuntimeSink = requires(B b, Writer w, ShapeNode s, Witness x) { b.add_sink(w, s, SchemaPolicy::Exact, x); };
template <class B>
concept CanRun = requires(B b) { b.run(); };
template <class B>
concept CanTypedSource = requires(B b, Reader r) { b.template source<Reading>(r); };
template <class B>
concept CanSource = requires(B b, Reader r, ShapeNode s) { b.source(r, s); };

// Illegal transitions do not type-check.
static_assert(!CanTransform<Empty> && !CanTypedSink<Empty> && !CanRuntimeSink<Empty> && !CanRun<Empty>);
static_assert(CanTypedSource<Empty> && CanSource<Empty>);
static_assert(!CanTypedSource<Sourced> && !CanSource<Sourced>);
static_assert(CanTransform<Sourced> && CanTypedSink<Sourced> && CanRuntimeSink<Sourced> && CanRun<Sourced>);

const char* kClean = "{\"id\":1,\"values\":[1.5,2.0]}\n{\"id\":2,\"values\":[]}\n";
const char* kNullElements = "{\"id\":1,\"values\":[1.5,null]}\n{\"id\":2,\"values\":[3.0]}\n";

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "shapegate-pipeline-tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Builder, StartsEmptyAndBuildersAreIndependent) {
  auto a = new_pipeline();
  auto b = new_pipeline();
  EXPECT_EQ(a.phase(), Phase::Empty);
  auto a2 = a.source<Reading>(jsonl_text_source(kClean));
  EXPECT_EQ(a2.phase(), Phase::HasSource);
  EXPECT_EQ(a.state().stages.size(), 0U);
  EXPECT_EQ(b.state().stages.size(), 0U);
  EXPECT_EQ(*a2.state().current_out_shape, derive_shape<Reading>().shape());
}

TEST(Builder, SourceCanonicalizesOrRejectsDeclaredShape) {
  auto ok = new_pipeline().source(jsonl_text_source(kClean), record({field("n", optional(string()))}));
  EXPECT_EQ(*ok.state().current_out_shape, record({field("n", string(), {.optional = true})}));
  EXPECT_THROW((void)new_pipeline().source(jsonl_text_source(kClean), record({field("n", optional(optional(string())))})),
               PipelineError);
  EXPECT_THROW((void)new_pipeline().source(jsonl_text_source(kClean), int64()), PipelineError);
}

TEST(Builder, GreenPathWritesAllRows) {
  auto path = temp_path("green.jsonl");
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source(kClean))
                    .add_sink<ReadingOut, SchemaPolicy::Exact>(jsonl_file_sink(path))
                    .run();
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report.sinks.size(), 1U);
  EXPECT_EQ(report.sinks[0].rows_written, 2U);
  EXPECT_EQ(slurp(path), "{\"id\":1,\"values\":[1.5,2.0]}\n{\"id\":2,\"values\":[]}\n");
}

TEST(Builder, RedPathWritesNothing) {
  auto path = temp_path("red.jsonl");
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source(kNullElements))
                    .add_sink<ReadingOut, SchemaPolicy::Exact>(jsonl_file_sink(path))
                    .run();
  EXPECT_EQ(report.status, RunStatus::SinkDrift);
  ASSERT_EQ(report.sinks.size(), 1U);
  EXPECT_EQ(report.sinks[0].status, StageStatus::Drift);
  EXPECT_EQ(report.sinks[0].rows_written, 0U);
  ASSERT_TRUE(report.sinks[0].drift.has_value());
  ASSERT_EQ(report.sinks[0].drift->items.size(), 1U);
  EXPECT_EQ(report.sinks[0].drift->items[0].kind, DriftKind::NestedOptionalityMismatch);
  EXPECT_EQ(render_path(report.sinks[0].drift->items[0].path).str(), "Values[]");
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Builder, BackwardWithoutTransform) {
  MemorySink out;
  auto report = new_pipeline()
                    .source<Signup>(jsonl_text_source("{\"id\":1,\"email\":\"a@x\",\"campaign\":\"spring\"}\n"))
                    .add_sink<Mailing, SchemaPolicy::Backward>(out.writer())
                    .run();
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report.sinks[0].rows_written, 1U);
  EXPECT_EQ(out.contents(), "{\"id\":1,\"email\":\"a@x\",\"campaign\":\"spring\"}\n");
}

TEST(Builder, ForwardWithoutTransform) {
  MemorySink out;
  auto report = new_pipeline()
                    .source<Slim>(jsonl_text_source("{\"id\":4}\n{\"id\":5}\n"))
                    .add_sink<Wide, SchemaPolicy::Forward>(out.writer())
                    .run();
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report.sinks[0].rows_written, 2U);
}

Dataset drop_values(const Dataset& in) {
  std::vector<RuntimeField> fields{in.schema().fields()[0]};
  std::vector<Row> rows;
  for (const Row& r : in.rows()) rows.push_back({r[0]});
  return Dataset(RuntimeSchema{RuntimeType::record(std::move(fields))}, std::move(rows));
}

Dataset reverse_fields(const Dataset& in) {
  std::vector<RuntimeField> fields(in.schema().fields().rbegin(), in.schema().fields().rend());
  std::vector<Row> rows;
  for (const Row& r : in.rows()) rows.emplace_back(r.rbegin(), r.rend());
  return Dataset(RuntimeSchema{RuntimeType::record(std::move(fields))}, std::move(rows));
}

TEST(Builder, MidPipelinePinAbortsOnDroppedField) {
  MemorySink out;
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source(kClean))
                    .transform<Reading>(drop_values, "drop")
                    .add_sink<ReadingOut, SchemaPolicy::Exact>(out.writer())
                    .run();
  EXPECT_EQ(report.status, RunStatus::PinAborted);
  ASSERT_EQ(report.stages.size(), 2U);
  ASSERT_TRUE(report.stages[1].drift.has_value());
  EXPECT_EQ(report.stages[1].drift->items[0].kind, DriftKind::MissingField);
  EXPECT_EQ(report.sinks[0].status, StageStatus::Skipped);
  EXPECT_EQ(out.writes(), 0U);
}

TEST(Builder, MidPipelinePinIgnoresFieldOrderAndIdentity) {
  MemorySink out;
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source(kClean))
                    .transform<Reading>([](const Dataset& d) { return d; }, "identity")
                    .transform<Reading>(reverse_fields, "reverse")
                    .add_sink<ReadingOut, SchemaPolicy::Exact>(out.writer())
                    .run();
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(out.contents(), "{\"values\":[1.5,2.0],\"id\":1}\n{\"values\":[],\"id\":2}\n");
}

TEST(Builder, SinksAreIndependent) {
  MemorySink loose, strict;
  ShapeNode producer = derive_shape<Reading>().shape();
  ShapeNode strict_contract = record({field("id", int64()), field("values", sequence(float64()))});
  ShapeNode loose_contract = record({field("id", int64())});
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source(kNullElements))
                    .add_sink(strict.writer(), strict_contract, SchemaPolicy::ExactOrdered,
                              conforms(producer, strict_contract, SchemaPolicy::ExactOrdered).witness(), "strict")
                    .add_sink(loose.writer(), loose_contract, SchemaPolicy::Backward,
                              conforms(producer, loose_contract, SchemaPolicy::Backward).witness(), "loose")
                    .run();
  EXPECT_EQ(report.status, RunStatus::SinkDrift);
  EXPECT_EQ(report.sinks[0].status, StageStatus::Drift);
  EXPECT_EQ(report.sinks[1].status, StageStatus::Ok);
  EXPECT_EQ(strict.writes(), 0U);
  EXPECT_TRUE(strict.contents().empty());
  EXPECT_EQ(report.sinks[1].rows_written, 2U);
}

TEST(Builder, RuntimeWitnessIsReverified) {
  ShapeNode producer = derive_shape<Reading>().shape();
  ShapeNode contract = record({field("id", int64()), field("values", sequence(float64()))});
  ShapeNode other = record({field("id", int64())});
  auto b = new_pipeline().source<Reading>(jsonl_text_source(kClean));
  Witness w = conforms(producer, contract, SchemaPolicy::Exact).witness();
  EXPECT_NO_THROW((void)b.add_sink(MemorySink{}.writer(), contract, SchemaPolicy::Exact, w));
  EXPECT_THROW((void)b.add_sink(MemorySink{}.writer(), other, SchemaPolicy::Exact, w), WitnessMismatch);
  EXPECT_THROW((void)b.add_sink(MemorySink{}.writer(), contract, SchemaPolicy::Full, w), WitnessMismatch);
  Witness stale = conforms(other, other, SchemaPolicy::Exact).witness();
  try {
    (void)b.add_sink(MemorySink{}.writer(), other, SchemaPolicy::Exact, stale, "s");
    FAIL();
  } catch (const WitnessMismatch& e) {
    EXPECT_EQ(std::string(e.what()).rfind("WitnessMismatch at sink 's'", 0), 0U);
  }
}

TEST(Builder, StaticEvidenceMatchesRuntimeWitness) {
  constexpr Witness w = static_assert_conforms<Reading, ReadingOut, SchemaPolicy::Exact>();
  EXPECT_EQ(w, conforms(derive_shape<Reading>().shape(), derive_shape<ReadingOut>().shape(), SchemaPolicy::Exact).witness());
  auto b = new_pipeline()
               .source<Reading>(jsonl_text_source(kClean))
               .add_sink(MemorySink{}.writer(), SchemaConforms<Reading, ReadingOut, SchemaPolicy::Exact>{});
  EXPECT_EQ(b.sink_count(), 1U);
}

TEST(Builder, RunWithoutSinkIsRejected) {
  auto b = new_pipeline().source<Reading>(jsonl_text_source(kClean));
  EXPECT_THROW((void)b.run(), PipelineError);
}

TEST(Builder, SourceFailureIsCapturedInReport) {
  auto report = new_pipeline()
                    .source<Reading>(jsonl_text_source("{\"id\":\n"))
                    .add_sink<ReadingOut, SchemaPolicy::Exact>(MemorySink{}.writer())
                    .run();
  EXPECT_EQ(report.status, RunStatus::Error);
  EXPECT_FALSE(report.stages[0].error.empty());
}

// The sink verdict, the runtime validate verdict, and the shape-level verdict agree.
TEST(Builder, ThreeWayAgreement) {
  const char* inputs[] = {kClean, kNullElements, "{\"id\":1,\"values\":[1.0],\"extra\":true}\n",
                          "{\"ID\":1,\"values\":[1.0]}\n"};
  ShapeNode contract = derive_shape<ReadingOut>().shape();
  ShapeNode producer = derive_shape<Reading>().shape();
  for (SchemaPolicy p : kAllPolicies) {
    Verdict declared = conforms(producer, contract, p);
    if (!declared.ok()) continue;
    for (const char* input : inputs) {
      Dataset ds = read_jsonl_text(input);
      auto report = new_pipeline()
                        .source<Reading>(dataset_source(ds))
                        .add_sink(MemorySink{}.writer(), contract, p, declared.witness())
                        .run();
      Verdict runtime = validate(ds.schema(), schema_for(contract), p);
      Verdict shapes = conforms(shape_of(ds.schema()), contract, p);
      ASSERT_EQ(runtime.ok(), shapes.ok());
      ASSERT_EQ(report.sinks[0].status == StageStatus::Ok, runtime.ok()) << policy_name(p) << " " << input;
      if (!runtime.ok()) {
        ASSERT_EQ(report.sinks[0].drift->render().str(), runtime.report().render().str());
        ASSERT_EQ(runtime.report().render().str(), shapes.report().render().str());
      }
    }
  }
}

}  // namespace
