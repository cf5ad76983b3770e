#pragma once

// Runtime schema model (record / array / map with nullability flags and
// hasDefault metadata), its canonical JSON form, derivation from contract
// shapes, validation, and the two reference comparators whose semantics the
// policy-aware validator is measured against.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegate/policy.hpp"
#include "shapegate/shape.hpp"

namespace shapegate {

struct RuntimeField;

class RuntimeType {
 public:
  enum class Kind { Atomic, Array, Map, Record };

  RuntimeType() = default;

  static RuntimeType atomic(PrimitiveKind kind) {
    RuntimeType t;
    t.kind_ = Kind::Atomic;
    t.primitive_ = kind;
    return t;
  }
  static RuntimeType array(RuntimeType element, bool contains_null) {
    RuntimeType t;
    t.kind_ = Kind::Array;
    t.child_.push_back(std::move(element));
    t.contains_null_ = contains_null;
    return t;
  }
  static RuntimeType map(PrimitiveKind key, RuntimeType value, bool value_contains_null) {
    RuntimeType t;
    t.kind_ = Kind::Map;
    t.primitive_ = key;
    t.child_.push_back(std::move(value));
    t.contains_null_ = value_contains_null;
    return t;
  }
  static RuntimeType record(std::vector<RuntimeField> fields);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] PrimitiveKind atomic_kind() const noexcept { return primitive_; }
  [[nodiscard]] PrimitiveKind key_kind() const noexcept { return primitive_; }
  /// Array element or map value type.
  [[nodiscard]] const RuntimeType& child() const { return child_.front(); }
  /// containsNull for arrays, valueContainsNull for maps.
  [[nodiscard]] bool contains_null() const noexcept { return contains_null_; }
  [[nodiscard]] const std::vector<RuntimeField>& fields() const noexcept { return fields_; }

  friend bool operator==(const RuntimeType& a, const RuntimeType& b);

 private:
  Kind kind_ = Kind::Record;
  PrimitiveKind primitive_ = PrimitiveKind::Boolean;
  std::vector<RuntimeType> child_;
  bool contains_null_ = false;
  std::vector<RuntimeField> fields_;
};

struct RuntimeField {
  std::string name;
  RuntimeType type;
  bool nullable = false;
  /// The only recognized metadata key is "hasDefault".
  bool has_default = false;

  friend bool operator==(const RuntimeField&, const RuntimeField&) = default;
};

inline RuntimeType RuntimeType::record(std::vector<RuntimeField> fields) {
  RuntimeType t;
  t.kind_ = Kind::Record;
  t.fields_ = std::move(fields);
  return t;
}

inline bool operator==(const RuntimeType& a, const RuntimeType& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case RuntimeType::Kind::Atomic: return a.primitive_ == b.primitive_;
    case RuntimeType::Kind::Array: return a.contains_null_ == b.contains_null_ && a.child_ == b.child_;
    case RuntimeType::Kind::Map:
      return a.primitive_ == b.primitive_ && a.contains_null_ == b.contains_null_ && a.child_ == b.child_;
    case RuntimeType::Kind::Record: return a.fields_ == b.fields_;
  }
  return false;
}

struct RuntimeSchema {
  RuntimeType root = RuntimeType::record({});

  [[nodiscard]] const std::vector<RuntimeField>& fields() const { return root.fields(); }
  friend bool operator==(const RuntimeSchema&, const RuntimeSchema&) = default;
};

// ---------------------------------------------------------------------------
// Shape <-> schema

namespace detail {

inline RuntimeType runtime_type_for(const ShapeNode& shape) {
  switch (shape.kind()) {
    case NodeKind::Primitive: return RuntimeType::atomic(shape.primitive_kind());
    case NodeKind::Sequence: {
      bool nullable = shape.child().is(NodeKind::Optional);
      return RuntimeType::array(runtime_type_for(nullable ? shape.child().child() : shape.child()), nullable);
    }
    case NodeKind::Mapping: {
      bool nullable = shape.child().is(NodeKind::Optional);
      return RuntimeType::map(shape.key_kind(), runtime_type_for(nullable ? shape.child().child() : shape.child()),
                              nullable);
    }
    case NodeKind::Record: {
      std::vector<RuntimeField> fields;
      fields.reserve(shape.fields().size());
      for (const FieldShape& f : shape.fields()) {
        fields.push_back(RuntimeField{f.name.str(), runtime_type_for(f.shape), f.is_optional, f.has_default});
      }
      return RuntimeType::record(std::move(fields));
    }
    case NodeKind::Optional:
      // Canonical shapes carry no Optional outside sequence/map slots.
      throw std::invalid_argument("schemaFor: non-canonical shape (optional outside a collection slot)");
  }
  throw std::invalid_argument("schemaFor: unknown shape kind");
}

inline ShapeNode shape_for(const RuntimeType& type) {
  switch (type.kind()) {
    case RuntimeType::Kind::Atomic: return ShapeNode::primitive(type.atomic_kind());
    case RuntimeType::Kind::Array: {
      ShapeNode element = shape_for(type.child());
      return ShapeNode::sequence(type.contains_null() ? ShapeNode::optional(std::move(element)) : std::move(element));
    }
    case RuntimeType::Kind::Map: {
      ShapeNode value = shape_for(type.child());
      return ShapeNode::mapping(type.key_kind(),
                                type.contains_null() ? ShapeNode::optional(std::move(value)) : std::move(value));
    }
    case RuntimeType::Kind::Record: {
      cx::vector<FieldShape> fields;
      fields.reserve(type.fields().size());
      for (const RuntimeField& f : type.fields()) {
        fields.push_back(FieldShape{cx::string(f.name), shape_for(f.type), f.has_default, f.nullable});
      }
      return ShapeNode::record(std::move(fields));
    }
  }
  return {};
}

}  // namespace detail

/// Runtime schema derived from a canonical contract Record shape.
inline RuntimeSchema schema_for(const ShapeNode& contract) {
  if (!contract.is(NodeKind::Record)) throw std::invalid_argument("schemaFor: contract shape must be a record");
  return RuntimeSchema{detail::runtime_type_for(contract)};
}

/// Inverse of schema_for.
inline ShapeNode shape_of(const RuntimeSchema& schema) { return detail::shape_for(schema.root); }

/// Same verdict as conforms() on the corresponding shapes.
inline Verdict validate(const RuntimeSchema& actual, const RuntimeSchema& contract, SchemaPolicy policy) {
  return conforms(shape_of(actual), shape_of(contract), policy);
}

// ---------------------------------------------------------------------------
// Reference comparators

namespace detail {

inline bool same_ignoring_nullability(const RuntimeType& a, const RuntimeType& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case RuntimeType::Kind::Atomic: return a.atomic_kind() == b.atomic_kind();
    case RuntimeType::Kind::Array: return same_ignoring_nullability(a.child(), b.child());
    case RuntimeType::Kind::Map:
      return a.key_kind() == b.key_kind() && same_ignoring_nullability(a.child(), b.child());
    case RuntimeType::Kind::Record: {
      const auto& af = a.fields();
      const auto& bf = b.fields();
      if (af.size() != bf.size()) return false;
      for (const RuntimeField& fa : af) {
        auto folded = fold_name(fa.name);
        const RuntimeField* match = nullptr;
        for (const RuntimeField& fb : bf) {
          if (fold_name(fb.name) == folded) {
            match = &fb;
            break;
          }
        }
        if (match == nullptr || !same_ignoring_nullability(fa.type, match->type)) return false;
      }
      return true;
    }
  }
  return false;
}

template <class NameEq>
bool same_structure(const RuntimeType& a, const RuntimeType& b, const NameEq& names_equal) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case RuntimeType::Kind::Atomic: return a.atomic_kind() == b.atomic_kind();
    case RuntimeType::Kind::Array: return same_structure(a.child(), b.child(), names_equal);
    case RuntimeType::Kind::Map:
      return a.key_kind() == b.key_kind() && same_structure(a.child(), b.child(), names_equal);
    case RuntimeType::Kind::Record: {
      const auto& af = a.fields();
      const auto& bf = b.fields();
      if (af.size() != bf.size()) return false;
      for (std::size_t i = 0; i < af.size(); ++i) {
        if (!names_equal(af[i].name, bf[i].name) || !same_structure(af[i].type, bf[i].type, names_equal)) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Unordered, case-insensitive by-name equality that ignores field
/// nullability and array/map null flags.
inline bool baseline_ignore_case_and_nullability(const RuntimeSchema& a, const RuntimeSchema& b) {
  return detail::same_ignoring_nullability(a.root, b.root);
}

/// By-position equality: same arity everywhere, pairwise equal types, names
/// and nullability flags ignored.
inline bool baseline_structurally(const RuntimeSchema& a, const RuntimeSchema& b) {
  return detail::same_structure(a.root, b.root, [](std::string_view, std::string_view) { return true; });
}

/// By-position equality where names must agree under a caller-supplied resolver.
inline bool baseline_structurally_by_name(
    const RuntimeSchema& a, const RuntimeSchema& b,
    const std::function<bool(std::string_view, std::string_view)>& resolver) {
  return detail::same_structure(a.root, b.root, resolver);
}

// ---------------------------------------------------------------------------
// Canonical JSON

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0, std::size_t column = 0, std::string code = "ParseError")
      : std::runtime_error(std::move(message)), line_(line), column_(column), code_(std::move(code)) {}

  /// 1-based; 0 when the error is structural rather than lexical.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  /// "ParseError" or "NonAtomicMapKey".
  [[nodiscard]] const std::string& code() const noexcept { return code_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string code_;
};

namespace detail {

inline nlohmann::ordered_json type_to_json(const RuntimeType& t) {
  nlohmann::ordered_json j;
  switch (t.kind()) {
    case RuntimeType::Kind::Atomic: j["type"] = primitive_name(t.atomic_kind()); break;
    case RuntimeType::Kind::Array:
      j["type"] = "array";
      j["element"] = type_to_json(t.child());
      j["containsNull"] = t.contains_null();
      break;
    case RuntimeType::Kind::Map:
      j["type"] = "map";
      j["key"] = primitive_name(t.key_kind());
      j["value"] = type_to_json(t.child());
      j["valueContainsNull"] = t.contains_null();
      break;
    case RuntimeType::Kind::Record: {
      j["type"] = "record";
      auto fields = nlohmann::ordered_json::array();
      for (const RuntimeField& f : t.fields()) {
        nlohmann::ordered_json jf;
        jf["name"] = f.name;
        jf["type"] = type_to_json(f.type);
        jf["nullable"] = f.nullable;
        if (f.has_default) jf["metadata"] = nlohmann::ordered_json{{"hasDefault", true}};
        fields.push_back(std::move(jf));
      }
      j["fields"] = std::move(fields);
      break;
    }
  }
  return j;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

class SchemaReader {
 public:
  RuntimeType type(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a type object");
    const std::string kind = string_member(j, "type", where);
    if (kind == "record") {
      allow_keys(j, where, {"type", "fields"});
      const auto& fields = member(j, "fields", where);
      if (!fields.is_array()) fail(where + "/fields", "expected an array");
      std::vector<RuntimeField> out;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        out.push_back(field(fields[i], where + "/fields/" + std::to_string(i)));
        for (std::size_t k = 0; k + 1 < out.size(); ++k) {
          if (out[k].name == out.back().name) {
            fail(where + "/fields/" + std::to_string(i), "duplicate field name '" + out.back().name + "'");
          }
        }
      }
      return RuntimeType::record(std::move(out));
    }
    if (kind == "array") {
      allow_keys(j, where, {"type", "element", "containsNull"});
      RuntimeType element = type(member(j, "element", where), where + "/element");
      return RuntimeType::array(std::move(element), bool_member(j, "containsNull", where));
    }
    if (kind == "map") {
      allow_keys(j, where, {"type", "key", "value", "valueContainsNull"});
      const auto& key = member(j, "key", where);
      std::optional<PrimitiveKind> key_kind;
      if (key.is_string()) key_kind = parse_primitive(key.get<std::string>());
      if (!key_kind) {
        throw ParseError("NonAtomicMapKey at " + where + "/key: map keys must name a primitive type, found " +
                             key.dump(),
                         0, 0, "NonAtomicMapKey");
      }
      RuntimeType value = type(member(j, "value", where), where + "/value");
      return RuntimeType::map(*key_kind, std::move(value), bool_member(j, "valueContainsNull", where));
    }
    if (auto prim = parse_primitive(kind)) {
      allow_keys(j, where, {"type"});
      return RuntimeType::atomic(*prim);
    }
    fail(where + "/type", "unknown type '" + kind + "'");
  }

 private:
  RuntimeField field(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a field object");
    allow_keys(j, where, {"name", "type", "nullable", "metadata"});
    RuntimeField f;
    f.name = string_member(j, "name", where);
    if (f.name.empty()) fail(where + "/name", "field name must be non-empty");
    f.type = type(member(j, "type", where), where + "/type");
    f.nullable = bool_member(j, "nullable", where);
    if (j.contains("metadata")) {
      const auto& meta = j["metadata"];
      if (!meta.is_object()) fail(where + "/metadata", "expected an object");
      allow_keys(meta, where + "/metadata", {"hasDefault"});
      if (meta.contains("hasDefault")) f.has_default = bool_member(meta, "hasDefault", where + "/metadata");
    }
    return f;
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ParseError("invalid schema at " + (where.empty() ? std::string("/") : where) + ": " + what);
  }

  static const nlohmann::json& member(const nlohmann::json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
  }

  static std::string string_member(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_string()) fail(where + "/" + key, "expected a string");
    return v.get<std::string>();
  }

  static bool bool_member(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_boolean()) fail(where + "/" + key, "expected a boolean");
    return v.get<bool>();
  }

  static void allow_keys(const nlohmann::json& j, const std::string& where, std::initializer_list<std::string_view> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (std::string_view k : keys) known = known || it.key() == k;
      if (!known) fail(where, "unknown key '" + it.key() + "'");
    }
  }
};

}  // namespace detail

inline nlohmann::ordered_json schema_to_json(const RuntimeSchema& schema) { return detail::type_to_json(schema.root); }

/// Canonical text: fixed key order, two-space indentation, trailing newline.
inline std::string serialize_schema(const RuntimeSchema& schema) { return schema_to_json(schema).dump(2) + "\n"; }

inline RuntimeSchema schema_from_json(const nlohmann::json& j) {
  RuntimeType root = detail::SchemaReader{}.type(j, "");
  if (root.kind() != RuntimeType::Kind::Record) throw ParseError("invalid schema at /: root must be a record");
  return RuntimeSchema{std::move(root)};
}

inline RuntimeSchema parse_schema(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  }
  return schema_from_json(j);
}

}  // namespace shapegate
