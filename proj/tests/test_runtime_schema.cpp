#include <gtest/gtest.h>

#include <string>

#include "shapegate/runtime_schema.hpp"
#include "support/universe.hpp"

namespace {

using namespace shapegate;
using namespace shapegate::shapes;

RuntimeType atom(PrimitiveKind k) { return RuntimeType::atomic(k); }

RuntimeSchema schema_of(std::vector<RuntimeField> fields) { return RuntimeSchema{RuntimeType::record(std::move(fields))}; }

RuntimeSchema tags_schema(bool contains_null) {
  return schema_of({{"tags", RuntimeType::array(atom(PrimitiveKind::String), contains_null), false, false}});
}

TEST(SchemaFor, SequenceOfOptionalBecomesNullableElements) {
  RuntimeSchema s = schema_for(record({field("tags", sequence(optional(string())))}));
  ASSERT_EQ(s.fields().size(), 1U);
  const RuntimeField& f = s.fields()[0];
  EXPECT_EQ(f.name, "tags");
  EXPECT_FALSE(f.nullable);
  ASSERT_EQ(f.type.kind(), RuntimeType::Kind::Array);
  EXPECT_TRUE(f.type.contains_null());
  EXPECT_EQ(f.type.child(), atom(PrimitiveKind::String));
}

TEST(SchemaFor, FieldFlagsMapToNullableAndMetadata) {
  RuntimeSchema s = schema_for(record({field("nick", string(), {.optional = true, .has_default = true})}));
  EXPECT_TRUE(s.fields()[0].nullable);
  EXPECT_TRUE(s.fields()[0].has_default);
}

TEST(SchemaFor, EmptyRecord) {
  RuntimeSchema s = schema_for(record({}));
  EXPECT_EQ(s.root.kind(), RuntimeType::Kind::Record);
  EXPECT_TRUE(s.fields().empty());
}

TEST(SchemaFor, MapsAndNestedRecords) {
  RuntimeSchema s = schema_for(record({field("m", mapping(PrimitiveKind::String, optional(record({field("x", int32())}))))}));
  const RuntimeType& m = s.fields()[0].type;
  ASSERT_EQ(m.kind(), RuntimeType::Kind::Map);
  EXPECT_EQ(m.key_kind(), PrimitiveKind::String);
  EXPECT_TRUE(m.contains_null());
  ASSERT_EQ(m.child().kind(), RuntimeType::Kind::Record);
  EXPECT_EQ(m.child().fields()[0].name, "x");
}

TEST(ShapeOf, UnfoldsFlags) {
  RuntimeSchema s = schema_of({{"xs", RuntimeType::array(atom(PrimitiveKind::Int64), false), false, false},
                               {"n", atom(PrimitiveKind::String), true, false}});
  EXPECT_EQ(shape_of(s), record({field("xs", sequence(int64())), field("n", string(), {.optional = true})}));
  EXPECT_TRUE(is_canonical(shape_of(s)));
}

TEST(ShapeOf, InvertsSchemaForOverCorpus) {
  for (const ref::Node* n : universe::corpus().shapes()) {
    ShapeNode s = ref::to_shape(*n);
    if (!s.is(NodeKind::Record)) continue;
    ASSERT_EQ(shape_of(schema_for(s)), s) << describe(s).str();
  }
}

TEST(Validate, IdentityUnderEveryPolicy) {
  RuntimeSchema s = tags_schema(true);
  for (SchemaPolicy p : kAllPolicies) EXPECT_TRUE(validate(s, s, p).ok());
}

TEST(Validate, NestedNullabilityDriftUnderExact) {
  Verdict v = validate(tags_schema(true), tags_schema(false), SchemaPolicy::Exact);
  ASSERT_FALSE(v.ok());
  ASSERT_EQ(v.report().items.size(), 1U);
  EXPECT_EQ(v.report().items[0].kind, DriftKind::NestedOptionalityMismatch);
  EXPECT_EQ(render_path(v.report().items[0].path).str(), "tags[]");
}

TEST(Validate, BackwardExtraFieldAndNullableMissing) {
  RuntimeSchema actual = schema_of({{"id", atom(PrimitiveKind::Int64), false, false},
                                    {"extra", atom(PrimitiveKind::Boolean), false, false}});
  RuntimeSchema contract = schema_of({{"id", atom(PrimitiveKind::Int64), false, false},
                                      {"nick", atom(PrimitiveKind::String), true, false}});
  EXPECT_TRUE(validate(actual, contract, SchemaPolicy::Backward).ok());
  EXPECT_FALSE(validate(actual, contract, SchemaPolicy::Exact).ok());
}

TEST(Baselines, IgnoreCaseAndNullability) {
  RuntimeSchema a = schema_of({{"Id", atom(PrimitiveKind::Int64), false, false},
                               {"tags", RuntimeType::array(atom(PrimitiveKind::String), true), true, false}});
  RuntimeSchema b = schema_of({{"tags", RuntimeType::array(atom(PrimitiveKind::String), false), false, false},
                               {"id", atom(PrimitiveKind::Int64), true, false}});
  EXPECT_TRUE(baseline_ignore_case_and_nullability(a, a));
  EXPECT_TRUE(baseline_ignore_case_and_nullability(a, b));
  EXPECT_TRUE(baseline_ignore_case_and_nullability(tags_schema(true), tags_schema(false)));
  RuntimeSchema c = schema_of({{"Id", atom(PrimitiveKind::Int32), false, false},
                               {"tags", RuntimeType::array(atom(PrimitiveKind::String), true), true, false}});
  EXPECT_FALSE(baseline_ignore_case_and_nullability(a, c));
  RuntimeSchema d = schema_of({{"Id", atom(PrimitiveKind::Int64), false, false}});
  EXPECT_FALSE(baseline_ignore_case_and_nullability(a, d));
}

TEST(Baselines, Structurally) {
  RuntimeSchema a = schema_of({{"a", atom(PrimitiveKind::Int64), false, false},
                               {"b", atom(PrimitiveKind::String), false, false}});
  RuntimeSchema renamed = schema_of({{"x", atom(PrimitiveKind::Int64), true, false},
                                     {"y", atom(PrimitiveKind::String), false, false}});
  RuntimeSchema swapped = schema_of({{"b", atom(PrimitiveKind::String), false, false},
                                     {"a", atom(PrimitiveKind::Int64), false, false}});
  RuntimeSchema shorter = schema_of({{"a", atom(PrimitiveKind::Int64), false, false}});
  EXPECT_TRUE(baseline_structurally(a, renamed));
  EXPECT_FALSE(baseline_structurally(a, shorter));
  EXPECT_FALSE(baseline_structurally(a, swapped));
  EXPECT_TRUE(baseline_structurally(tags_schema(true), tags_schema(false)));
}

TEST(Baselines, StructurallyByNameUsesResolver) {
  RuntimeSchema a = schema_of({{"Id", atom(PrimitiveKind::Int64), false, false}});
  RuntimeSchema b = schema_of({{"id", atom(PrimitiveKind::Int64), false, false}});
  auto exact = [](std::string_view x, std::string_view y) { return x == y; };
  auto folded = [](std::string_view x, std::string_view y) { return fold_name(x) == fold_name(y); };
  EXPECT_FALSE(baseline_structurally_by_name(a, b, exact));
  EXPECT_TRUE(baseline_structurally_by_name(a, b, folded));
}

TEST(Serialize, CanonicalText) {
  RuntimeSchema s = schema_of({{"id", atom(PrimitiveKind::Int64), false, false},
                               {"nick", atom(PrimitiveKind::String), true, true},
                               {"m", RuntimeType::map(PrimitiveKind::String, atom(PrimitiveKind::Float64), true), false,
                                false}});
  const std::string expected = R"({
  "type": "record",
  "fields": [
    {
      "name": "id",
      "type": {
        "type": "int64"
      },
      "nullable": false
    },
    {
      "name": "nick",
      "type": {
        "type": "string"
      },
      "nullable": true,
      "metadata": {
        "hasDefault": true
      }
    },
    {
      "name": "m",
      "type": {
        "type": "map",
        "key": "string",
        "value": {
          "type": "float64"
        },
        "valueContainsNull": true
      },
      "nullable": false
    }
  ]
}
)";
  EXPECT_EQ(serialize_schema(s), expected);
  EXPECT_EQ(parse_schema(expected), s);
}

TEST(Serialize, RoundTripIsByteIdenticalOverCorpus) {
  for (const ref::Node* n : universe::corpus().shapes()) {
    ShapeNode shape = ref::to_shape(*n);
    if (!shape.is(NodeKind::Record)) continue;
    RuntimeSchema s = schema_for(shape);
    std::string text = serialize_schema(s);
    RuntimeSchema back = parse_schema(text);
    ASSERT_EQ(back, s);
    ASSERT_EQ(serialize_schema(back), text);
  }
}

TEST(Parse, EmptyRecord) {
  RuntimeSchema s = parse_schema(R"({"type":"record","fields":[]})");
  EXPECT_TRUE(s.fields().empty());
}

TEST(Parse, RecordKeyedMapIsRejected) {
  try {
    parse_schema(R"({"type":"record","fields":[{"name":"m","type":{"type":"map","key":"record",
      "value":{"type":"int64"},"valueContainsNull":false},"nullable":false}]})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), "NonAtomicMapKey");
  }
}

TEST(Parse, MalformedJsonReportsLineAndColumn) {
  try {
    parse_schema("{\n  \"type\": \"record\",\n  \"fields\": [,]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3U);
    EXPECT_EQ(e.column(), 14U);
    EXPECT_EQ(e.code(), "ParseError");
  }
}

TEST(Parse, StructuralErrors) {
  auto rejects = [](const std::string& text, const std::string& needle) {
    try {
      parse_schema(text);
    } catch (const ParseError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(rejects(R"({"type":"int64"})", "root must be a record"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[],"extra":1})", "unknown key 'extra'"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[{"name":"a","type":{"type":"int64"},"nullable":false,
    "metadata":{"doc":true}}]})", "unknown key 'doc'"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[{"name":"a","type":{"type":"int64"},"nullable":false},
    {"name":"a","type":{"type":"string"},"nullable":false}]})", "duplicate field name 'a'"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[{"name":"a","type":{"type":"int128"},"nullable":false}]})",
                      "unknown type 'int128'"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[{"name":"a","type":{"type":"int64"}}]})",
                      "missing key 'nullable'"));
  EXPECT_TRUE(rejects(R"({"type":"record","fields":[{"name":"","type":{"type":"int64"},"nullable":false}]})",
                      "non-empty"));
}

TEST(Parse, AbsentMetadataMeansNoDefault) {
  RuntimeSchema s = parse_schema(R"({"type":"record","fields":[{"name":"n","type":{"type":"string"},"nullable":true}]})");
  EXPECT_FALSE(s.fields()[0].has_default);
  EXPECT_EQ(shape_of(s), record({field("n", string(), {.optional = true})}));
}

}  // namespace
