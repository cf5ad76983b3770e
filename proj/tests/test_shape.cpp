#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shapegate/shape.hpp"
#include "support/universe.hpp"

namespace {

using namespace shapegate;
using namespace shapegate::shapes;

TEST(PrimitiveKind, ClosedSetOfEightNamedKinds) {
  std::set<std::string> names;
  for (PrimitiveKind k : kAllPrimitiveKinds) {
    names.insert(std::string(primitive_name(k)));
    EXPECT_EQ(parse_primitive(primitive_name(k)), k);
  }
  EXPECT_EQ(names, (std::set<std::string>{"boolean", "int32", "int64", "float64", "string", "binary", "date",
                                          "timestamp"}));
  EXPECT_FALSE(parse_primitive("decimal").has_value());
}

TEST(ShapeNode, EqualityIsStructural) {
  EXPECT_EQ(sequence(optional(string())), sequence(optional(string())));
  EXPECT_NE(sequence(optional(string())), sequence(string()));
  EXPECT_NE(int32(), int64());
  EXPECT_NE(record({field("a", int64())}), record({field("a", int64(), {.optional = true})}));
  EXPECT_NE(mapping(PrimitiveKind::String, int64()), mapping(PrimitiveKind::Int64, int64()));
}

TEST(ShapeNode, UsableInConstantExpressions) {
  constexpr bool same = [] {
    ShapeNode a = record({field("id", int64()), field("tags", sequence(optional(string())))});
    ShapeNode b = a;
    return a == b && b.fields().size() == 2 && b.fields()[1].shape.child().is(NodeKind::Optional);
  }();
  static_assert(same);
}

TEST(RenderPath, SegmentsRenderPerRule) {
  EXPECT_EQ(render_path(StructuralPath{}.field("items").element().field("price")).str(), "items[].price");
  EXPECT_EQ(render_path(StructuralPath{}.field("attrs").map_value().field("x")).str(), "attrs{value}.x");
  EXPECT_EQ(render_path(StructuralPath{}.position(2)).str(), "#2");
  EXPECT_EQ(render_path(StructuralPath{}).str(), "");
  EXPECT_EQ(display_path(StructuralPath{}).str(), "<root>");
  EXPECT_EQ(render_path(StructuralPath{}.field("a").position(0).element()).str(), "a#0[]");
}

TEST(Describe, CompactTypeText) {
  EXPECT_EQ(describe(sequence(optional(int64()))).str(), "sequence<optional<int64>>");
  EXPECT_EQ(describe(mapping(PrimitiveKind::String, float64())).str(), "map<string, float64>");
  EXPECT_EQ(describe(record({field("a", int64()), field("b", string())})).str(), "record{a, b}");
}

TEST(Canonicalize, FoldsFieldRootOptional) {
  ShapeResult r = canonicalize(record({field("a", optional(int64()))}));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.shape(), record({field("a", int64(), {.optional = true})}));
}

TEST(Canonicalize, RejectsDoubleOptional) {
  ShapeResult r = canonicalize(record({field("a", optional(optional(string())))}));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().kind, ShapeErrorKind::DoubleOptional);
  EXPECT_EQ(render_path(r.error().path).str(), "a");

  ShapeResult nested = canonicalize(record({field("xs", sequence(optional(optional(int64()))))}));
  ASSERT_FALSE(nested.ok());
  EXPECT_EQ(nested.error().kind, ShapeErrorKind::DoubleOptional);
  EXPECT_EQ(render_path(nested.error().path).str(), "xs[]");
}

TEST(Canonicalize, KeepsNestedOptionality) {
  ShapeNode s = sequence(optional(string()));
  ShapeResult r = canonicalize(s);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.shape(), s);
}

TEST(Canonicalize, RejectsDuplicateNamesBeforeFolding) {
  ShapeResult dup = canonicalize(record({field("a", int64()), field("a", string())}));
  ASSERT_FALSE(dup.ok());
  EXPECT_EQ(dup.error().kind, ShapeErrorKind::DuplicateName);
  EXPECT_EQ(render_path(dup.error().path).str(), "a");
  // Case variants are distinct names at this layer.
  EXPECT_TRUE(canonicalize(record({field("a", int64()), field("A", string())})).ok());
}

TEST(Canonicalize, RejectsMisplacedOptionalAndEmptyNames) {
  EXPECT_EQ(canonicalize(optional(record({}))).error().kind, ShapeErrorKind::UnsupportedShape);
  ShapeResult empty = canonicalize(record({field("", int64())}));
  ASSERT_FALSE(empty.ok());
  EXPECT_EQ(empty.error().kind, ShapeErrorKind::UnsupportedShape);
  EXPECT_EQ(render_path(empty.error().path).str(), "#0");
}

TEST(Canonicalize, ErrorMessageNamesKindAndPath) {
  ShapeResult r = canonicalize(record({field("outer", record({field("x", int64()), field("x", int64())}))}));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().message().str(), "DuplicateName at outer.x: field name 'x' is declared twice");
}

// Independent FNV-1a over the documented encoding.
std::uint64_t fnv(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

TEST(Fingerprint, MatchesHandEncodedDigest) {
  // Record(4), 1 field, name "a" (length 1), flags 0, Primitive(0) int64(2).
  std::vector<std::uint8_t> a = {4, 1, 0, 0, 0, 1, 0, 0, 0, 'a', 0, 0, 2};
  std::vector<std::uint8_t> b = {4, 1, 0, 0, 0, 1, 0, 0, 0, 'b', 0, 0, 2};
  EXPECT_EQ(fingerprint(record({field("a", int64())})), fnv(a));
  EXPECT_EQ(fingerprint(record({field("b", int64())})), fnv(b));
  EXPECT_NE(fnv(a), fnv(b));
}

TEST(Fingerprint, DistinguishesFlagsAndNesting) {
  EXPECT_NE(fingerprint(record({field("a", int64())})), fingerprint(record({field("a", int64(), {.optional = true})})));
  EXPECT_NE(fingerprint(record({field("a", int64())})),
            fingerprint(record({field("a", int64(), {.has_default = true})})));
  EXPECT_NE(fingerprint(sequence(optional(int64()))), fingerprint(sequence(int64())));
  // Length prefixes keep ("ab","c") and ("a","bc") apart.
  EXPECT_NE(fingerprint(record({field("ab", int64()), field("c", int64())})),
            fingerprint(record({field("a", int64()), field("bc", int64())})));
}

bool brute_force_acceptable(const ShapeNode& n) {
  switch (n.kind()) {
    case NodeKind::Primitive: return true;
    case NodeKind::Optional: return !n.child().is(NodeKind::Optional) && brute_force_acceptable(n.child());
    case NodeKind::Sequence:
    case NodeKind::Mapping: return brute_force_acceptable(n.child());
    case NodeKind::Record: {
      std::set<std::string> seen;
      for (const FieldShape& f : n.fields()) {
        if (!seen.insert(f.name.str()).second) return false;
        if (!brute_force_acceptable(f.shape)) return false;
      }
      return true;
    }
  }
  return false;
}

std::size_t count_fields(const ShapeNode& n, std::vector<std::vector<std::string>>& order) {
  std::size_t total = 0;
  switch (n.kind()) {
    case NodeKind::Primitive: break;
    case NodeKind::Optional:
    case NodeKind::Sequence:
    case NodeKind::Mapping: total += count_fields(n.child(), order); break;
    case NodeKind::Record: {
      std::vector<std::string> names;
      for (const FieldShape& f : n.fields()) names.push_back(f.name.str());
      order.push_back(names);
      total += n.fields().size();
      for (const FieldShape& f : n.fields()) total += count_fields(f.shape, order);
    }
  }
  return total;
}

TEST(CanonicalizeProperty, AcceptsExactlyShapesWithoutDoubleOptionalOrDuplicates) {
  universe::RawGen gen(20240611);
  std::size_t accepted = 0, rejected = 0;
  for (int i = 0; i < 20000; ++i) {
    ShapeNode raw = gen.record(3);
    ShapeResult r = canonicalize(raw);
    ASSERT_EQ(r.ok(), brute_force_acceptable(raw)) << describe(raw).str();
    if (!r.ok()) {
      ++rejected;
      continue;
    }
    ++accepted;
    // Idempotent, and record field counts and order survive.
    ShapeResult again = canonicalize(r.shape());
    ASSERT_TRUE(again.ok());
    ASSERT_EQ(again.shape(), r.shape());
    ASSERT_TRUE(is_canonical(r.shape()));
    std::vector<std::vector<std::string>> before, after;
    ASSERT_EQ(count_fields(raw, before), count_fields(r.shape(), after));
    ASSERT_EQ(before, after);
  }
  EXPECT_GT(accepted, 1000U);
  EXPECT_GT(rejected, 1000U);
}

TEST(FingerprintProperty, EqualShapesEqualDigestsAcrossCorpus) {
  std::map<std::uint64_t, ShapeNode> seen;
  for (const ref::Node* n : universe::corpus().shapes()) {
    ShapeNode s = ref::to_shape(*n);
    ASSERT_EQ(fingerprint(s), fingerprint(ShapeNode(s)));
    auto [it, fresh] = seen.emplace(fingerprint(s), s);
    // A repeated digest must come from the same shape, never a different one.
    if (!fresh) {
      ASSERT_EQ(it->second, s);
    }
  }
  EXPECT_GT(seen.size(), 800U);
}

}  // namespace
