#pragma once

// Line-delimited JSON ingestion with schema inference, and schema-ordered
// emission. This is the boundary where runtime data can drift away from the
// declared types.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegate/reflect.hpp"
#include "shapegate/runtime_schema.hpp"

namespace shapegate {

struct Value;
using ValueList = std::vector<Value>;
/// Ordered name/value association: record fields in schema order, or map entries.
using ValueFields = std::vector<std::pair<std::string, Value>>;

struct Value {
  using Storage = std::variant<std::monostate, bool, std::int64_t, double, std::string, binary, date, timestamp,
                               ValueList, ValueFields>;
  Storage data;

  Value() = default;
  template <class T>
    requires std::is_constructible_v<Storage, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, Value>)
  Value(T&& v) : data(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] bool is_null() const noexcept { return std::holds_alternative<std::monostate>(data); }
  template <class T>
  [[nodiscard]] const T& as() const {
    return std::get<T>(data);
  }
  /// Field lookup for record values; nullptr when absent.
  [[nodiscard]] const Value* field(std::string_view name) const {
    const auto* fields = std::get_if<ValueFields>(&data);
    if (fields == nullptr) return nullptr;
    for (const auto& [k, v] : *fields) {
      if (k == name) return &v;
    }
    return nullptr;
  }

  friend bool operator==(const Value&, const Value&) = default;
};

using Row = ValueFields;

class InferenceError : public std::runtime_error {
 public:
  enum class Kind { AllNull, EmptyArray, Heterogeneous, NoRecords };

  InferenceError(Kind kind, std::string path, std::string detail)
      : std::runtime_error(render(kind, path, detail)), kind_(kind), path_(std::move(path)) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

  static std::string_view kind_name(Kind kind) {
    switch (kind) {
      case Kind::AllNull: return "AllNull";
      case Kind::EmptyArray: return "EmptyArray";
      case Kind::Heterogeneous: return "Heterogeneous";
      case Kind::NoRecords: return "NoRecords";
    }
    return "?";
  }

 private:
  static std::string render(Kind kind, const std::string& path, const std::string& detail) {
    std::string out(kind_name(kind));
    if (!path.empty()) out += " at " + path;
    if (!detail.empty()) out += ": " + detail;
    return out;
  }

  Kind kind_;
  std::string path_;
};

/// Immutable schema + rows pair.
class Dataset {
 public:
  Dataset() = default;
  Dataset(RuntimeSchema schema, std::vector<Row> rows) : schema_(std::move(schema)), rows_(std::move(rows)) {}

  [[nodiscard]] const RuntimeSchema& schema() const noexcept { return schema_; }
  [[nodiscard]] const std::vector<Row>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

 private:
  RuntimeSchema schema_;
  std::vector<Row> rows_;
};

// ---------------------------------------------------------------------------
// Inference

namespace detail {

/// Join-semilattice of JSON value types seen at one position.
struct Inferred {
  enum class Tag { Nothing, Boolean, Int, Float, String, Array, Object };

  Tag tag = Tag::Nothing;
  bool saw_null = false;
  // Array
  std::shared_ptr<Inferred> element;
  // Object: field order is first appearance.
  struct Slot {
    std::string name;
    std::shared_ptr<Inferred> type;
    std::size_t present = 0;
  };
  std::vector<Slot> slots;
  std::size_t objects = 0;

  static std::string_view tag_name(Tag t) {
    switch (t) {
      case Tag::Nothing: return "null";
      case Tag::Boolean: return "boolean";
      case Tag::Int: return "integer";
      case Tag::Float: return "float";
      case Tag::String: return "string";
      case Tag::Array: return "array";
      case Tag::Object: return "object";
    }
    return "?";
  }
};

inline std::string join_path(const std::string& path, const std::string& name) {
  return path.empty() ? name : path + "." + name;
}

inline void observe(Inferred& into, const nlohmann::ordered_json& v, const std::string& path);

inline void observe_object(Inferred& into, const nlohmann::ordered_json& obj, const std::string& path) {
  ++into.objects;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    Inferred::Slot* slot = nullptr;
    for (auto& s : into.slots) {
      if (s.name == it.key()) slot = &s;
    }
    if (slot == nullptr) {
      into.slots.push_back({it.key(), std::make_shared<Inferred>(), 0});
      slot = &into.slots.back();
    }
    ++slot->present;
    observe(*slot->type, it.value(), join_path(path, it.key()));
  }
}

inline Inferred::Tag tag_of(const nlohmann::ordered_json& v) {
  using Tag = Inferred::Tag;
  switch (v.type()) {
    case nlohmann::ordered_json::value_t::boolean: return Tag::Boolean;
    case nlohmann::ordered_json::value_t::number_integer: return Tag::Int;
    case nlohmann::ordered_json::value_t::number_unsigned:
      return v.get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX) ? Tag::Int : Tag::Float;
    case nlohmann::ordered_json::value_t::number_float: return Tag::Float;
    case nlohmann::ordered_json::value_t::string: return Tag::String;
    case nlohmann::ordered_json::value_t::array: return Tag::Array;
    case nlohmann::ordered_json::value_t::object: return Tag::Object;
    default: return Tag::Nothing;
  }
}

inline void observe(Inferred& into, const nlohmann::ordered_json& v, const std::string& path) {
  using Tag = Inferred::Tag;
  if (v.is_null()) {
    into.saw_null = true;
    return;
  }
  Tag t = tag_of(v);
  if (into.tag == Tag::Nothing) {
    into.tag = t;
  } else if (into.tag != t) {
    bool numeric = (into.tag == Tag::Int || into.tag == Tag::Float) && (t == Tag::Int || t == Tag::Float);
    if (!numeric) {
      throw InferenceError(InferenceError::Kind::Heterogeneous, path,
                           std::string(Inferred::tag_name(into.tag)) + " vs " + std::string(Inferred::tag_name(t)));
    }
    into.tag = Tag::Float;
  }
  if (t == Tag::Array) {
    if (!into.element) into.element = std::make_shared<Inferred>();
    for (const auto& e : v) observe(*into.element, e, path + "[]");
  } else if (t == Tag::Object) {
    observe_object(into, v, path);
  }
}

inline RuntimeType resolve(const Inferred& inf, const std::string& path);

inline RuntimeType resolve_object(const Inferred& inf, const std::string& path) {
  std::vector<RuntimeField> fields;
  for (const auto& slot : inf.slots) {
    std::string fpath = join_path(path, slot.name);
    if (slot.type->tag == Inferred::Tag::Nothing) {
      throw InferenceError(InferenceError::Kind::AllNull, fpath, "field is null or absent in every record");
    }
    bool nullable = slot.present < inf.objects || slot.type->saw_null;
    fields.push_back(RuntimeField{slot.name, resolve(*slot.type, fpath), nullable, false});
  }
  return RuntimeType::record(std::move(fields));
}

inline RuntimeType resolve(const Inferred& inf, const std::string& path) {
  using Tag = Inferred::Tag;
  switch (inf.tag) {
    case Tag::Boolean: return RuntimeType::atomic(PrimitiveKind::Boolean);
    case Tag::Int: return RuntimeType::atomic(PrimitiveKind::Int64);
    case Tag::Float: return RuntimeType::atomic(PrimitiveKind::Float64);
    case Tag::String: return RuntimeType::atomic(PrimitiveKind::String);
    case Tag::Array: {
      const Inferred* e = inf.element.get();
      if (e == nullptr || (e->tag == Tag::Nothing && !e->saw_null)) {
        throw InferenceError(InferenceError::Kind::EmptyArray, path, "array is empty in every record");
      }
      if (e->tag == Tag::Nothing) {
        throw InferenceError(InferenceError::Kind::AllNull, path + "[]", "every array element is null");
      }
      return RuntimeType::array(resolve(*e, path + "[]"), e->saw_null);
    }
    case Tag::Object: return resolve_object(inf, path);
    case Tag::Nothing: break;
  }
  throw InferenceError(InferenceError::Kind::AllNull, path, "value is null in every record");
}

inline Value coerce(const nlohmann::ordered_json& v, const RuntimeType& type) {
  if (v.is_null()) return Value{};
  switch (type.kind()) {
    case RuntimeType::Kind::Atomic:
      switch (type.atomic_kind()) {
        case PrimitiveKind::Boolean: return v.get<bool>();
        case PrimitiveKind::Int64:
        case PrimitiveKind::Int32: return v.get<std::int64_t>();
        case PrimitiveKind::Float64: return v.get<double>();
        default: return v.get<std::string>();
      }
    case RuntimeType::Kind::Array: {
      ValueList out;
      out.reserve(v.size());
      for (const auto& e : v) out.push_back(coerce(e, type.child()));
      return out;
    }
    case RuntimeType::Kind::Map: {
      ValueFields out;
      for (auto it = v.begin(); it != v.end(); ++it) out.emplace_back(it.key(), coerce(it.value(), type.child()));
      return out;
    }
    case RuntimeType::Kind::Record: {
      ValueFields out;
      for (const RuntimeField& f : type.fields()) {
        auto it = v.find(f.name);
        out.emplace_back(f.name, it == v.end() ? Value{} : coerce(*it, f.type));
      }
      return out;
    }
  }
  return Value{};
}

}  // namespace detail

/// Schema of a non-empty sequence of JSON objects. Objects always infer as
/// records; fields appear in first-appearance order.
inline RuntimeSchema infer_schema(const std::vector<nlohmann::ordered_json>& records) {
  if (records.empty()) throw InferenceError(InferenceError::Kind::NoRecords, "", "no records");
  detail::Inferred root;
  root.tag = detail::Inferred::Tag::Object;
  for (const auto& r : records) {
    if (!r.is_object()) throw InferenceError(InferenceError::Kind::Heterogeneous, "", "record is not a JSON object");
    detail::observe_object(root, r, "");
  }
  return RuntimeSchema{detail::resolve_object(root, "")};
}

/// Dataset whose rows are the records coerced to `schema` (missing fields
/// become nulls, integers in float64 columns become doubles).
inline Dataset make_dataset(const std::vector<nlohmann::ordered_json>& records, RuntimeSchema schema) {
  std::vector<Row> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(detail::coerce(r, schema.root).as<ValueFields>());
  return Dataset(std::move(schema), std::move(rows));
}

/// One JSON object per non-blank line; ParseError carries the 1-based line.
inline std::vector<nlohmann::ordered_json> parse_jsonl(std::istream& in) {
  std::vector<nlohmann::ordered_json> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::ordered_json::parse_error& e) {
      throw ParseError("malformed JSON at line " + std::to_string(line_no) + ", column " + std::to_string(e.byte) +
                           ": " + e.what(),
                       line_no, e.byte);
    }
    if (!j.is_object()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected a JSON object", line_no, 1);
    }
    records.push_back(std::move(j));
  }
  if (in.bad()) throw std::runtime_error("read failure after line " + std::to_string(line_no));
  return records;
}

inline Dataset read_jsonl(std::istream& in) {
  auto records = parse_jsonl(in);
  RuntimeSchema schema = infer_schema(records);
  return make_dataset(records, std::move(schema));
}

inline Dataset read_jsonl_text(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in);
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline std::string format_date(date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(timestamp t) {
  auto day = std::chrono::floor<std::chrono::days>(t);
  std::chrono::hh_mm_ss<std::chrono::microseconds> tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d.%06ldZ", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()),
                static_cast<long>(tod.subseconds().count()));
  return format_date(day) + buf;
}

inline std::string base64(const binary& b) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  std::size_t i = 0;
  const auto& bytes = b.bytes;
  for (; i + 2 < bytes.size(); i += 3) {
    auto n = (std::to_integer<unsigned>(bytes[i]) << 16) | (std::to_integer<unsigned>(bytes[i + 1]) << 8) |
             std::to_integer<unsigned>(bytes[i + 2]);
    for (int k = 3; k >= 0; --k) out += kAlphabet[(n >> (6 * k)) & 0x3F];
  }
  if (i < bytes.size()) {
    unsigned n = std::to_integer<unsigned>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) n |= std::to_integer<unsigned>(bytes[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 0x3F];
    out += kAlphabet[(n >> 12) & 0x3F];
    out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 0x3F] : '=';
    out += '=';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, date>) {
          return format_date(x);
        } else if constexpr (std::is_same_v<T, timestamp>) {
          return format_timestamp(x);
        } else if constexpr (std::is_same_v<T, binary>) {
          return base64(x);
        } else if constexpr (std::is_same_v<T, ValueList>) {
          auto out = nlohmann::ordered_json::array();
          for (const Value& e : x) out.push_back(to_json(e));
          return out;
        } else if constexpr (std::is_same_v<T, ValueFields>) {
          auto out = nlohmann::ordered_json::object();
          for (const auto& [k, e] : x) out[k] = to_json(e);
          return out;
        } else {
          return x;
        }
      },
      v.data);
}

inline nlohmann::ordered_json row_to_json(const Row& row, const RuntimeSchema& schema) {
  auto out = nlohmann::ordered_json::object();
  for (const RuntimeField& f : schema.fields()) {
    const Value* v = nullptr;
    for (const auto& [k, x] : row) {
      if (k == f.name) v = &x;
    }
    out[f.name] = v == nullptr ? nlohmann::ordered_json(nullptr) : to_json(*v);
  }
  return out;
}

}  // namespace detail

/// One compact JSON object per line in schema field order, nulls explicit.
inline std::size_t write_jsonl(const Dataset& dataset, std::ostream& out) {
  for (const Row& row : dataset.rows()) out << detail::row_to_json(row, dataset.schema()).dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failure while emitting JSONL");
  return dataset.size();
}

}  // namespace shapegate
