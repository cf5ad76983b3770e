#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "shapegate/cx.hpp"

namespace shapegate {

enum class PrimitiveKind : std::uint8_t {
  Boolean,
  Int32,
  Int64,
  Float64,
  String,
  Binary,
  Date,
  Timestamp,
};

inline constexpr PrimitiveKind kAllPrimitiveKinds[] = {
    PrimitiveKind::Boolean, PrimitiveKind::Int32,  PrimitiveKind::Int64, PrimitiveKind::Float64,
    PrimitiveKind::String,  PrimitiveKind::Binary, PrimitiveKind::Date,  PrimitiveKind::Timestamp,
};

constexpr std::string_view primitive_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Boolean: return "boolean";
    case PrimitiveKind::Int32: return "int32";
    case PrimitiveKind::Int64: return "int64";
    case PrimitiveKind::Float64: return "float64";
    case PrimitiveKind::String: return "string";
    case PrimitiveKind::Binary: return "binary";
    case PrimitiveKind::Date: return "date";
    case PrimitiveKind::Timestamp: return "timestamp";
  }
  return "?";
}

constexpr std::optional<PrimitiveKind> parse_primitive(std::string_view name) {
  for (PrimitiveKind kind : kAllPrimitiveKinds) {
    if (primitive_name(kind) == name) return kind;
  }
  return std::nullopt;
}

enum class NodeKind : std::uint8_t { Primitive, Optional, Sequence, Mapping, Record };

struct FieldShape;

/// Normalized structural shape of a declared type. Value type; Optional,
/// Sequence and Mapping nodes own exactly one child, Record nodes own an
/// ordered field list.
class ShapeNode {
 public:
  constexpr ShapeNode();
  constexpr ShapeNode(const ShapeNode&);
  constexpr ShapeNode(ShapeNode&&) noexcept;
  constexpr ShapeNode& operator=(const ShapeNode&);
  constexpr ShapeNode& operator=(ShapeNode&&) noexcept;
  constexpr ~ShapeNode();

  static constexpr ShapeNode primitive(PrimitiveKind kind);
  static constexpr ShapeNode optional(ShapeNode inner);
  static constexpr ShapeNode sequence(ShapeNode element);
  static constexpr ShapeNode mapping(PrimitiveKind key, ShapeNode value);
  static constexpr ShapeNode record(cx::vector<FieldShape> fields);

  [[nodiscard]] constexpr NodeKind kind() const noexcept { return kind_; }
  [[nodiscard]] constexpr bool is(NodeKind k) const noexcept { return kind_ == k; }

  /// Primitive kind of a Primitive node, or the key kind of a Mapping node.
  [[nodiscard]] constexpr PrimitiveKind primitive_kind() const noexcept { return primitive_; }
  [[nodiscard]] constexpr PrimitiveKind key_kind() const noexcept { return primitive_; }

  /// Wrapped node of Optional, element of Sequence, value of Mapping.
  [[nodiscard]] constexpr const ShapeNode& child() const { return child_[0]; }
  [[nodiscard]] constexpr ShapeNode& child() { return child_[0]; }

  [[nodiscard]] constexpr const cx::vector<FieldShape>& fields() const noexcept { return fields_; }
  [[nodiscard]] constexpr cx::vector<FieldShape>& fields() noexcept { return fields_; }

  friend constexpr bool operator==(const ShapeNode& a, const ShapeNode& b);

 private:
  NodeKind kind_ = NodeKind::Record;
  PrimitiveKind primitive_ = PrimitiveKind::Boolean;
  cx::vector<ShapeNode> child_;
  cx::vector<FieldShape> fields_;
};

struct FieldShape {
  cx::string name;
  ShapeNode shape;
  bool has_default = false;
  bool is_optional = false;

  friend constexpr bool operator==(const FieldShape&, const FieldShape&) = default;
};

constexpr ShapeNode::ShapeNode() = default;
constexpr ShapeNode::ShapeNode(const ShapeNode&) = default;
constexpr ShapeNode::ShapeNode(ShapeNode&&) noexcept = default;
constexpr ShapeNode& ShapeNode::operator=(const ShapeNode&) = default;
constexpr ShapeNode& ShapeNode::operator=(ShapeNode&&) noexcept = default;
constexpr ShapeNode::~ShapeNode() = default;

constexpr ShapeNode ShapeNode::primitive(PrimitiveKind kind) {
  ShapeNode n;
  n.kind_ = NodeKind::Primitive;
  n.primitive_ = kind;
  return n;
}

constexpr ShapeNode ShapeNode::optional(ShapeNode inner) {
  ShapeNode n;
  n.kind_ = NodeKind::Optional;
  n.child_.push_back(std::move(inner));
  return n;
}

constexpr ShapeNode ShapeNode::sequence(ShapeNode element) {
  ShapeNode n;
  n.kind_ = NodeKind::Sequence;
  n.child_.push_back(std::move(element));
  return n;
}

constexpr ShapeNode ShapeNode::mapping(PrimitiveKind key, ShapeNode value) {
  ShapeNode n;
  n.kind_ = NodeKind::Mapping;
  n.primitive_ = key;
  n.child_.push_back(std::move(value));
  return n;
}

constexpr ShapeNode ShapeNode::record(cx::vector<FieldShape> fields) {
  ShapeNode n;
  n.kind_ = NodeKind::Record;
  n.fields_ = std::move(fields);
  return n;
}

constexpr bool operator==(const ShapeNode& a, const ShapeNode& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case NodeKind::Primitive: return a.primitive_ == b.primitive_;
    case NodeKind::Optional:
    case NodeKind::Sequence: return a.child_ == b.child_;
    case NodeKind::Mapping: return a.primitive_ == b.primitive_ && a.child_ == b.child_;
    case NodeKind::Record: return a.fields_ == b.fields_;
  }
  return false;
}

// Shorthand constructors, mostly for tests and hand-written contracts.
namespace shapes {
constexpr ShapeNode prim(PrimitiveKind k) { return ShapeNode::primitive(k); }
constexpr ShapeNode boolean() { return prim(PrimitiveKind::Boolean); }
constexpr ShapeNode int32() { return prim(PrimitiveKind::Int32); }
constexpr ShapeNode int64() { return prim(PrimitiveKind::Int64); }
constexpr ShapeNode float64() { return prim(PrimitiveKind::Float64); }
constexpr ShapeNode string() { return prim(PrimitiveKind::String); }
constexpr ShapeNode optional(ShapeNode inner) { return ShapeNode::optional(std::move(inner)); }
constexpr ShapeNode sequence(ShapeNode element) { return ShapeNode::sequence(std::move(element)); }
constexpr ShapeNode mapping(PrimitiveKind key, ShapeNode value) {
  return ShapeNode::mapping(key, std::move(value));
}
constexpr ShapeNode record(std::initializer_list<FieldShape> fields) {
  cx::vector<FieldShape> v;
  for (const FieldShape& f : fields) v.push_back(f);
  return ShapeNode::record(std::move(v));
}

struct FieldFlags {
  bool optional = false;
  bool has_default = false;
};
constexpr FieldShape field(std::string_view name, ShapeNode shape, FieldFlags flags = {}) {
  return FieldShape{cx::string(name), std::move(shape), flags.has_default, flags.optional};
}
}  // namespace shapes

// ---------------------------------------------------------------------------
// Structural paths

enum class SegmentKind : std::uint8_t { Field, Element, MapValue, Position };

struct PathSegment {
  SegmentKind kind = SegmentKind::Field;
  cx::string name;
  std::size_t index = 0;

  friend constexpr bool operator==(const PathSegment&, const PathSegment&) = default;
};

class StructuralPath {
 public:
  constexpr StructuralPath() = default;

  [[nodiscard]] constexpr StructuralPath field(std::string_view name) const {
    return with(PathSegment{SegmentKind::Field, cx::string(name), 0});
  }
  [[nodiscard]] constexpr StructuralPath element() const {
    return with(PathSegment{SegmentKind::Element, {}, 0});
  }
  [[nodiscard]] constexpr StructuralPath map_value() const {
    return with(PathSegment{SegmentKind::MapValue, {}, 0});
  }
  [[nodiscard]] constexpr StructuralPath position(std::size_t i) const {
    return with(PathSegment{SegmentKind::Position, {}, i});
  }

  [[nodiscard]] constexpr const cx::vector<PathSegment>& segments() const noexcept { return segments_; }
  [[nodiscard]] constexpr bool empty() const noexcept { return segments_.empty(); }

  friend constexpr bool operator==(const StructuralPath&, const StructuralPath&) = default;

 private:
  constexpr StructuralPath with(PathSegment seg) const {
    StructuralPath p = *this;
    p.segments_.push_back(std::move(seg));
    return p;
  }

  cx::vector<PathSegment> segments_;
};

/// ".name" per field (no leading dot at the root), "[]" for sequence
/// elements, "{value}" for map values, "#i" for positions.
constexpr cx::string render_path(const StructuralPath& path) {
  cx::string out;
  for (const PathSegment& seg : path.segments()) {
    switch (seg.kind) {
      case SegmentKind::Field:
        if (!out.empty()) out += '.';
        out += seg.name;
        break;
      case SegmentKind::Element: out += "[]"; break;
      case SegmentKind::MapValue: out += "{value}"; break;
      case SegmentKind::Position:
        out += '#';
        out += cx::to_string(seg.index);
        break;
    }
  }
  return out;
}

/// Rendered path for human-facing messages; the root renders as "<root>".
constexpr cx::string display_path(const StructuralPath& path) {
  if (path.empty()) return cx::string("<root>");
  return render_path(path);
}

/// Compact type description used in drift reports, e.g. "sequence<optional<int64>>".
constexpr cx::string describe(const ShapeNode& shape) {
  cx::string out;
  switch (shape.kind()) {
    case NodeKind::Primitive: out += primitive_name(shape.primitive_kind()); break;
    case NodeKind::Optional:
      out += "optional<";
      out += describe(shape.child());
      out += '>';
      break;
    case NodeKind::Sequence:
      out += "sequence<";
      out += describe(shape.child());
      out += '>';
      break;
    case NodeKind::Mapping:
      out += "map<";
      out += primitive_name(shape.key_kind());
      out += ", ";
      out += describe(shape.child());
      out += '>';
      break;
    case NodeKind::Record: {
      out += "record{";
      bool first = true;
      for (const FieldShape& f : shape.fields()) {
        if (!first) out += ", ";
        first = false;
        out += f.name;
      }
      out += '}';
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonicalization

enum class ShapeErrorKind : std::uint8_t {
  DoubleOptional,
  DuplicateName,
  NonAtomicMapKey,
  UnsupportedShape,
};

constexpr std::string_view shape_error_name(ShapeErrorKind kind) {
  switch (kind) {
    case ShapeErrorKind::DoubleOptional: return "DoubleOptional";
    case ShapeErrorKind::DuplicateName: return "DuplicateName";
    case ShapeErrorKind::NonAtomicMapKey: return "NonAtomicMapKey";
    case ShapeErrorKind::UnsupportedShape: return "UnsupportedShape";
  }
  return "?";
}

struct ShapeError {
  ShapeErrorKind kind = ShapeErrorKind::UnsupportedShape;
  StructuralPath path;
  cx::string detail;

  /// "DoubleOptional at a: ..." style one-line message.
  [[nodiscard]] constexpr cx::string message() const {
    cx::string out(shape_error_name(kind));
    out += " at ";
    out += display_path(path);
    if (!detail.empty()) {
      out += ": ";
      out += detail;
    }
    return out;
  }

  friend constexpr bool operator==(const ShapeError&, const ShapeError&) = default;
};

/// Either a canonical shape or the first ShapeError found.
class ShapeResult {
 public:
  constexpr ShapeResult(ShapeNode shape) : shape_(std::move(shape)) {}
  constexpr ShapeResult(ShapeError error) : error_(std::move(error)) {}

  [[nodiscard]] constexpr bool ok() const noexcept { return shape_.has_value(); }
  constexpr explicit operator bool() const noexcept { return ok(); }
  [[nodiscard]] constexpr const ShapeNode& shape() const { return *shape_; }
  [[nodiscard]] constexpr ShapeNode& shape() { return *shape_; }
  [[nodiscard]] constexpr const ShapeError& error() const { return *error_; }

 private:
  std::optional<ShapeNode> shape_;
  std::optional<ShapeError> error_;
};

namespace detail {

constexpr std::optional<ShapeError> canonicalize_into(ShapeNode& node, const StructuralPath& path,
                                                      bool optional_allowed) {
  switch (node.kind()) {
    case NodeKind::Primitive: return std::nullopt;
    case NodeKind::Optional:
      if (!optional_allowed) {
        return ShapeError{ShapeErrorKind::UnsupportedShape, path,
                          "optional is only allowed at a field root, a sequence element or a map value"};
      }
      if (node.child().is(NodeKind::Optional)) {
        return ShapeError{ShapeErrorKind::DoubleOptional, path, "optional directly wraps optional"};
      }
      return canonicalize_into(node.child(), path, false);
    case NodeKind::Sequence: return canonicalize_into(node.child(), path.element(), true);
    case NodeKind::Mapping: return canonicalize_into(node.child(), path.map_value(), true);
    case NodeKind::Record: {
      auto& fields = node.fields();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        FieldShape& f = fields[i];
        StructuralPath fpath = path.field(f.name);
        if (f.name.empty()) {
          return ShapeError{ShapeErrorKind::UnsupportedShape, path.position(i), "empty field name"};
        }
        for (std::size_t j = 0; j < i; ++j) {
          if (fields[j].name == f.name) {
            return ShapeError{ShapeErrorKind::DuplicateName, fpath,
                              cx::string("field name '") + f.name.view() + "' is declared twice"};
          }
        }
        if (f.shape.is(NodeKind::Optional)) {
          if (f.shape.child().is(NodeKind::Optional)) {
            return ShapeError{ShapeErrorKind::DoubleOptional, fpath, "optional directly wraps optional"};
          }
          ShapeNode inner = std::move(f.shape.child());
          f.shape = std::move(inner);
          f.is_optional = true;
        }
        if (auto err = canonicalize_into(f.shape, fpath, false)) return err;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Folds field-root Optional nodes into FieldShape::is_optional and rejects
/// double optionals, duplicate names and misplaced optionals. Field order is
/// preserved.
constexpr ShapeResult canonicalize(ShapeNode raw) {
  if (raw.is(NodeKind::Optional)) {
    return ShapeError{ShapeErrorKind::UnsupportedShape, {}, "optional is not allowed at the root"};
  }
  if (auto err = detail::canonicalize_into(raw, {}, false)) return std::move(*err);
  return raw;
}

constexpr bool is_canonical(const ShapeNode& shape) {
  ShapeResult r = canonicalize(shape);
  return r.ok() && r.shape() == shape;
}

// ---------------------------------------------------------------------------
// Fingerprint: FNV-1a 64 over a length-prefixed pre-order encoding.

using Fingerprint = std::uint64_t;

namespace detail {

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ULL;

  constexpr void byte(std::uint8_t b) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  constexpr void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  constexpr void text(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
};

constexpr void encode(Fnv1a& h, const ShapeNode& shape) {
  h.byte(static_cast<std::uint8_t>(shape.kind()));
  switch (shape.kind()) {
    case NodeKind::Primitive: h.byte(static_cast<std::uint8_t>(shape.primitive_kind())); break;
    case NodeKind::Optional:
    case NodeKind::Sequence: encode(h, shape.child()); break;
    case NodeKind::Mapping:
      h.byte(static_cast<std::uint8_t>(shape.key_kind()));
      encode(h, shape.child());
      break;
    case NodeKind::Record:
      h.u32(static_cast<std::uint32_t>(shape.fields().size()));
      for (const FieldShape& f : shape.fields()) {
        h.text(f.name);
        h.byte(static_cast<std::uint8_t>((f.is_optional ? 1 : 0) | (f.has_default ? 2 : 0)));
        encode(h, f.shape);
      }
      break;
  }
}

}  // namespace detail

constexpr Fingerprint fingerprint(const ShapeNode& shape) {
  detail::Fnv1a h;
  detail::encode(h, shape);
  return h.state;
}

}  // namespace shapegate
