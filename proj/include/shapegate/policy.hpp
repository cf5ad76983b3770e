#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "shapegate/cx.hpp"
#include "shapegate/shape.hpp"

namespace shapegate {

enum class SchemaPolicy : std::uint8_t {
  Exact,
  ExactUnorderedCI,
  ExactOrdered,
  ExactOrderedCI,
  ExactByPosition,
  Backward,
  Forward,
  Full,
};

inline constexpr std::array<SchemaPolicy, 8> kAllPolicies = {
    SchemaPolicy::Exact,           SchemaPolicy::ExactUnorderedCI, SchemaPolicy::ExactOrdered,
    SchemaPolicy::ExactOrderedCI,  SchemaPolicy::ExactByPosition,  SchemaPolicy::Backward,
    SchemaPolicy::Forward,         SchemaPolicy::Full,
};

constexpr std::string_view policy_name(SchemaPolicy p) {
  switch (p) {
    case SchemaPolicy::Exact: return "Exact";
    case SchemaPolicy::ExactUnorderedCI: return "ExactUnorderedCI";
    case SchemaPolicy::ExactOrdered: return "ExactOrdered";
    case SchemaPolicy::ExactOrderedCI: return "ExactOrderedCI";
    case SchemaPolicy::ExactByPosition: return "ExactByPosition";
    case SchemaPolicy::Backward: return "Backward";
    case SchemaPolicy::Forward: return "Forward";
    case SchemaPolicy::Full: return "Full";
  }
  return "?";
}

/// Stable lowercase token used on command lines and in JSON reports.
constexpr std::string_view policy_token(SchemaPolicy p) {
  switch (p) {
    case SchemaPolicy::Exact: return "exact";
    case SchemaPolicy::ExactUnorderedCI: return "exact-unordered-ci";
    case SchemaPolicy::ExactOrdered: return "exact-ordered";
    case SchemaPolicy::ExactOrderedCI: return "exact-ordered-ci";
    case SchemaPolicy::ExactByPosition: return "exact-by-position";
    case SchemaPolicy::Backward: return "backward";
    case SchemaPolicy::Forward: return "forward";
    case SchemaPolicy::Full: return "full";
  }
  return "?";
}

constexpr std::optional<SchemaPolicy> parse_policy(std::string_view token) {
  for (SchemaPolicy p : kAllPolicies) {
    if (policy_token(p) == token || policy_name(p) == token) return p;
  }
  return std::nullopt;
}

enum class DriftKind : std::uint8_t {
  MissingField,
  ExtraField,
  NameMismatch,
  ArityMismatch,
  ShapeMismatch,
  NestedOptionalityMismatch,
  DuplicateFoldedName,
};

constexpr std::string_view drift_kind_name(DriftKind k) {
  switch (k) {
    case DriftKind::MissingField: return "MissingField";
    case DriftKind::ExtraField: return "ExtraField";
    case DriftKind::NameMismatch: return "NameMismatch";
    case DriftKind::ArityMismatch: return "ArityMismatch";
    case DriftKind::ShapeMismatch: return "ShapeMismatch";
    case DriftKind::NestedOptionalityMismatch: return "NestedOptionalityMismatch";
    case DriftKind::DuplicateFoldedName: return "DuplicateFoldedName";
  }
  return "?";
}

constexpr std::optional<DriftKind> parse_drift_kind(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(DriftKind::DuplicateFoldedName); ++i) {
    auto k = static_cast<DriftKind>(i);
    if (drift_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

struct DriftItem {
  DriftKind kind = DriftKind::ShapeMismatch;
  StructuralPath path;
  cx::string expected;
  cx::string actual;
  cx::string message;

  friend constexpr bool operator==(const DriftItem&, const DriftItem&) = default;
};

/// "KIND at PATH: expected E, actual A"
constexpr DriftItem make_drift_item(DriftKind kind, StructuralPath path, cx::string expected,
                                    cx::string actual) {
  cx::string msg(drift_kind_name(kind));
  msg += " at ";
  msg += display_path(path);
  msg += ": expected ";
  msg += expected;
  msg += ", actual ";
  msg += actual;
  return DriftItem{kind, std::move(path), std::move(expected), std::move(actual), std::move(msg)};
}

struct DriftReport {
  SchemaPolicy policy = SchemaPolicy::Exact;
  cx::vector<DriftItem> items;

  /// One item message per line, newline-terminated.
  [[nodiscard]] constexpr cx::string render() const {
    cx::string out;
    for (const DriftItem& item : items) {
      out += item.message;
      out += '\n';
    }
    return out;
  }

  friend constexpr bool operator==(const DriftReport&, const DriftReport&) = default;
};

class Witness;

namespace detail {
struct WitnessMint;
}

/// Proof that a producer shape conforms to a contract shape under a policy.
/// Minted only by conforms().
class Witness {
 public:
  [[nodiscard]] constexpr Fingerprint producer_fingerprint() const noexcept { return producer_; }
  [[nodiscard]] constexpr Fingerprint contract_fingerprint() const noexcept { return contract_; }
  [[nodiscard]] constexpr SchemaPolicy policy() const noexcept { return policy_; }

  friend constexpr bool operator==(const Witness&, const Witness&) = default;

 private:
  friend struct detail::WitnessMint;
  constexpr Witness(Fingerprint producer, Fingerprint contract, SchemaPolicy policy)
      : producer_(producer), contract_(contract), policy_(policy) {}

  Fingerprint producer_;
  Fingerprint contract_;
  SchemaPolicy policy_;
};

namespace detail {
struct WitnessMint {
  static constexpr Witness mint(Fingerprint p, Fingerprint c, SchemaPolicy policy) {
    return Witness(p, c, policy);
  }
};
}  // namespace detail

/// Outcome of a conformance check: a Witness, or a non-empty DriftReport.
class Verdict {
 public:
  constexpr explicit Verdict(Witness w) : witness_(w) {}
  constexpr explicit Verdict(DriftReport r) : report_(std::move(r)) {}

  [[nodiscard]] constexpr bool ok() const noexcept { return witness_.has_value(); }
  constexpr explicit operator bool() const noexcept { return ok(); }
  [[nodiscard]] constexpr const Witness& witness() const { return *witness_; }
  [[nodiscard]] constexpr const DriftReport& report() const noexcept { return report_; }

 private:
  std::optional<Witness> witness_;
  DriftReport report_;
};

// ---------------------------------------------------------------------------
// Case folding

namespace detail {

constexpr std::uint32_t fold_code_point(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  // Latin-1 supplement, except the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A pairs (upper even, lower odd), excluding the dotted/dotless i
  // and the odd-aligned block U+0139..U+0148 / U+0179..U+017E.
  if (cp >= 0x100 && cp <= 0x12F && cp % 2 == 0) return cp + 1;
  if (cp >= 0x132 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x177 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x179 && cp <= 0x17E && cp % 2 == 1) return cp + 1;
  // Greek capitals (U+03A2 is unassigned).
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  // Cyrillic.
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp;
}

constexpr void append_utf8(cx::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace detail

/// Locale-independent simple case folding. ASCII, Latin-1, Latin Extended-A,
/// basic Greek and Cyrillic capitals fold to lowercase; everything else
/// (including malformed UTF-8 bytes) passes through unchanged.
constexpr cx::string fold_name(std::string_view name) {
  cx::string out;
  std::size_t i = 0;
  while (i < name.size()) {
    auto b0 = static_cast<unsigned char>(name[i]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    bool valid = len != 0 && i + len <= name.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      valid = (static_cast<unsigned char>(name[i + k]) & 0xC0) == 0x80;
    }
    if (!valid) {
      out += name[i];
      ++i;
      continue;
    }
    std::uint32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(name[i + k]) & 0x3F);
    detail::append_utf8(out, detail::fold_code_point(cp));
    i += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conformance engine

namespace detail {

class ConformanceWalk {
 public:
  constexpr explicit ConformanceWalk(SchemaPolicy policy) : policy_(policy) {}

  constexpr void shapes(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    if (producer.kind() != contract.kind()) {
      drift(DriftKind::ShapeMismatch, path, describe(contract), describe(producer));
      return;
    }
    switch (contract.kind()) {
      case NodeKind::Primitive:
        if (producer.primitive_kind() != contract.primitive_kind()) {
          drift(DriftKind::ShapeMismatch, path, describe(contract), describe(producer));
        }
        return;
      case NodeKind::Optional:
        // Only reachable for non-canonical input.
        shapes(producer.child(), contract.child(), path);
        return;
      case NodeKind::Sequence:
        nested(producer.child(), contract.child(), path.element(), "element");
        return;
      case NodeKind::Mapping:
        if (producer.key_kind() != contract.key_kind()) {
          drift(DriftKind::ShapeMismatch, path, describe(contract), describe(producer));
        }
        nested(producer.child(), contract.child(), path.map_value(), "value");
        return;
      case NodeKind::Record:
        records(producer, contract, path);
        return;
    }
  }

  constexpr void records(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    switch (policy_) {
      case SchemaPolicy::Exact:
      case SchemaPolicy::ExactUnorderedCI: unordered_ci(producer, contract, path); return;
      case SchemaPolicy::ExactOrdered: ordered(producer, contract, path, false); return;
      case SchemaPolicy::ExactOrderedCI: ordered(producer, contract, path, true); return;
      case SchemaPolicy::ExactByPosition: by_position(producer, contract, path); return;
      case SchemaPolicy::Backward: backward(producer, contract, path); return;
      case SchemaPolicy::Forward: forward(producer, contract, path); return;
      case SchemaPolicy::Full: return;
    }
  }

  constexpr DriftReport take_report() {
    std::sort(items_.begin(), items_.end(), [](const DriftItem& a, const DriftItem& b) {
      auto pa = render_path(a.path);
      auto pb = render_path(b.path);
      if (pa != pb) return pa < pb;
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.expected != b.expected) return a.expected < b.expected;
      return a.actual < b.actual;
    });
    return DriftReport{policy_, std::move(items_)};
  }

 private:
  constexpr void drift(DriftKind kind, const StructuralPath& path, cx::string expected, cx::string actual) {
    items_.push_back(make_drift_item(kind, path, std::move(expected), std::move(actual)));
  }

  constexpr void nested(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path,
                        std::string_view slot) {
    bool p_opt = producer.is(NodeKind::Optional);
    bool c_opt = contract.is(NodeKind::Optional);
    if (p_opt != c_opt) {
      drift(DriftKind::NestedOptionalityMismatch, path, nullability(c_opt, slot), nullability(p_opt, slot));
    }
    shapes(p_opt ? producer.child() : producer, c_opt ? contract.child() : contract, path);
  }

  static constexpr cx::string nullability(bool nullable, std::string_view slot) {
    cx::string s(nullable ? "nullable " : "non-null ");
    s += slot;
    return s;
  }

  static constexpr cx::string field_text(const FieldShape& f) {
    cx::string s("field '");
    s += f.name;
    s += "' (";
    s += describe(f.shape);
    s += ')';
    return s;
  }

  static constexpr cx::string arity_text(std::size_t n) {
    cx::string s = cx::to_string(n);
    s += n == 1 ? " field" : " fields";
    return s;
  }

  constexpr bool report_folded_duplicates(const ShapeNode& record, const StructuralPath& path,
                                          std::string_view side, const cx::vector<cx::string>& folded) {
    bool found = false;
    const auto& fields = record.fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      for (std::size_t j = i + 1; j < fields.size(); ++j) {
        if (folded[i] == folded[j]) {
          cx::string actual("'");
          actual += fields[i].name;
          actual += "' and '";
          actual += fields[j].name;
          actual += "' in ";
          actual += side;
          drift(DriftKind::DuplicateFoldedName, path, "unique case-insensitive names", std::move(actual));
          found = true;
        }
      }
    }
    return found;
  }

  static constexpr cx::vector<cx::string> fold_all(const ShapeNode& record) {
    cx::vector<cx::string> out;
    out.reserve(record.fields().size());
    for (const FieldShape& f : record.fields()) out.push_back(fold_name(f.name));
    return out;
  }

  constexpr void unordered_ci(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    const auto pf = fold_all(producer);
    const auto cf = fold_all(contract);
    bool dup = report_folded_duplicates(producer, path, "producer", pf);
    dup = report_folded_duplicates(contract, path, "contract", cf) || dup;
    if (dup) return;

    const auto& pfields = producer.fields();
    const auto& cfields = contract.fields();
    for (std::size_t c = 0; c < cfields.size(); ++c) {
      std::size_t match = pfields.size();
      for (std::size_t p = 0; p < pfields.size(); ++p) {
        if (pf[p] == cf[c]) {
          match = p;
          break;
        }
      }
      StructuralPath fpath = path.field(cfields[c].name);
      if (match == pfields.size()) {
        drift(DriftKind::MissingField, fpath, field_text(cfields[c]), "absent");
      } else {
        shapes(pfields[match].shape, cfields[c].shape, fpath);
      }
    }
    for (std::size_t p = 0; p < pfields.size(); ++p) {
      bool known = false;
      for (std::size_t c = 0; c < cfields.size() && !known; ++c) known = pf[p] == cf[c];
      if (!known) drift(DriftKind::ExtraField, path.field(pfields[p].name), "absent", field_text(pfields[p]));
    }
  }

  constexpr void ordered(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path,
                         bool fold) {
    const auto& pfields = producer.fields();
    const auto& cfields = contract.fields();
    if (pfields.size() != cfields.size()) {
      drift(DriftKind::ArityMismatch, path, arity_text(cfields.size()), arity_text(pfields.size()));
      return;
    }
    for (std::size_t i = 0; i < cfields.size(); ++i) {
      bool same = fold ? fold_name(pfields[i].name) == fold_name(cfields[i].name)
                       : pfields[i].name == cfields[i].name;
      if (!same) {
        drift(DriftKind::NameMismatch, path.position(i), cx::string("'") + cfields[i].name.view() + "'",
              cx::string("'") + pfields[i].name.view() + "'");
        continue;
      }
      shapes(pfields[i].shape, cfields[i].shape, path.field(cfields[i].name));
    }
  }

  constexpr void by_position(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    const auto& pfields = producer.fields();
    const auto& cfields = contract.fields();
    if (pfields.size() != cfields.size()) {
      drift(DriftKind::ArityMismatch, path, arity_text(cfields.size()), arity_text(pfields.size()));
      return;
    }
    for (std::size_t i = 0; i < cfields.size(); ++i) shapes(pfields[i].shape, cfields[i].shape, path.position(i));
  }

  static constexpr const FieldShape* find_exact(const ShapeNode& record, std::string_view name) {
    for (const FieldShape& f : record.fields()) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }

  constexpr void backward(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    for (const FieldShape& c : contract.fields()) {
      StructuralPath fpath = path.field(c.name);
      if (const FieldShape* p = find_exact(producer, c.name)) {
        shapes(p->shape, c.shape, fpath);
      } else if (!c.is_optional && !c.has_default) {
        drift(DriftKind::MissingField, fpath, field_text(c), "absent");
      }
    }
  }

  constexpr void forward(const ShapeNode& producer, const ShapeNode& contract, const StructuralPath& path) {
    for (const FieldShape& p : producer.fields()) {
      StructuralPath fpath = path.field(p.name);
      if (const FieldShape* c = find_exact(contract, p.name)) {
        shapes(p.shape, c->shape, fpath);
      } else {
        drift(DriftKind::ExtraField, fpath, "absent", field_text(p));
      }
    }
  }

  SchemaPolicy policy_;
  cx::vector<DriftItem> items_;
};

}  // namespace detail

/// Checks that `producer` conforms to `contract` under `policy`. Both shapes
/// must be canonical. Collects every drift item rather than stopping at the
/// first one; field-level optionality of matched fields is never compared.
constexpr Verdict conforms(const ShapeNode& producer, const ShapeNode& contract, SchemaPolicy policy) {
  if (policy != SchemaPolicy::Full) {
    detail::ConformanceWalk walk(policy);
    walk.shapes(producer, contract, {});
    DriftReport report = walk.take_report();
    if (!report.items.empty()) return Verdict(std::move(report));
  }
  return Verdict(detail::WitnessMint::mint(fingerprint(producer), fingerprint(contract), policy));
}

}  // namespace shapegate
