#pragma once

// Build-time type descriptors. A record type opts in with SHAPEGATE_RECORD,
// which declares (next to the type, found by ADL) the ordered list of its
// fields together with their serialized names and has-default flags:
//
//   struct Person {
//     std::int64_t id;
//     std::optional<std::string> nick = "anon";
//   };
//   SHAPEGATE_RECORD(Person, SHAPEGATE_FIELD(id), SHAPEGATE_DEFAULTED(nick));
//
// derive_shape<Person>() then yields the canonical Record shape.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "shapegate/shape.hpp"

namespace shapegate {

/// Byte payload; derives the binary primitive.
struct binary {
  std::vector<std::byte> bytes;
  friend bool operator==(const binary&, const binary&) = default;
};
using date = std::chrono::sys_days;
using timestamp = std::chrono::sys_time<std::chrono::microseconds>;

template <auto Member>
struct member_field;

template <class Owner, class T, T Owner::*Member>
struct member_field<Member> {
  using owner_type = Owner;
  using value_type = T;
  std::string_view name;
  bool has_default = false;
};

template <class Record, class Fields>
struct record_description {
  std::string_view type_name;
  Fields fields;
};

template <class Record, class... Fields>
constexpr auto describe_record(std::string_view type_name, Fields... fields) {
  return record_description<Record, std::tuple<Fields...>>{type_name, std::tuple<Fields...>(fields...)};
}

namespace detail {

template <class T>
concept described_record = requires(const T* p) { shapegate_describe(p); };

/// Readable name of T taken from the compiler's function signature.
template <class T>
constexpr std::string_view type_name() {
#if defined(__clang__) || defined(__GNUC__)
  std::string_view sig = __PRETTY_FUNCTION__;
  std::size_t start = sig.find("T = ");
  if (start == std::string_view::npos) return "unknown";
  start += 4;
  std::size_t end = sig.find_first_of(";]", start);
  return sig.substr(start, end - start);
#else
  return "unknown";
#endif
}

template <class T>
constexpr std::string_view display_name() {
  if constexpr (described_record<T>) {
    return shapegate_describe(static_cast<const T*>(nullptr)).type_name;
  } else {
    return type_name<T>();
  }
}

template <class T> struct primitive_of { static constexpr bool value = false; };
template <> struct primitive_of<bool> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Boolean; };
template <> struct primitive_of<std::int32_t> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Int32; };
template <> struct primitive_of<std::int64_t> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Int64; };
template <> struct primitive_of<double> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Float64; };
template <> struct primitive_of<std::string> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::String; };
template <> struct primitive_of<binary> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Binary; };
template <> struct primitive_of<date> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Date; };
template <> struct primitive_of<timestamp> { static constexpr bool value = true; static constexpr auto kind = PrimitiveKind::Timestamp; };

template <class T> struct optional_of : std::false_type {};
template <class T> struct optional_of<std::optional<T>> : std::true_type { using inner = T; };

template <class T> struct sequence_of : std::false_type {};
template <class T, class A> struct sequence_of<std::vector<T, A>> : std::true_type { using element = T; };
template <class T, class A> struct sequence_of<std::list<T, A>> : std::true_type { using element = T; };
template <class T, class A> struct sequence_of<std::deque<T, A>> : std::true_type { using element = T; };

template <class T> struct mapping_of : std::false_type {};
template <class K, class V, class C, class A>
struct mapping_of<std::map<K, V, C, A>> : std::true_type { using key = K; using mapped = V; };
template <class K, class V, class H, class E, class A>
struct mapping_of<std::unordered_map<K, V, H, E, A>> : std::true_type { using key = K; using mapped = V; };

template <class T, class... Visiting>
inline constexpr bool is_visiting = (std::is_same_v<T, Visiting> || ...);

constexpr ShapeError unsupported(const StructuralPath& path, std::string_view what, std::string_view type) {
  cx::string detail(what);
  detail += ": ";
  detail += type;
  return ShapeError{ShapeErrorKind::UnsupportedShape, path, std::move(detail)};
}

template <class T, class... Visiting>
constexpr ShapeResult derive_node(const StructuralPath& path);

/// Field roots: an Optional wrapper becomes the field's is_optional flag.
template <class T, class... Visiting>
constexpr ShapeResult derive_field(const StructuralPath& path) {
  if constexpr (optional_of<T>::value) {
    using inner = typename optional_of<T>::inner;
    if constexpr (optional_of<inner>::value) {
      return ShapeError{ShapeErrorKind::DoubleOptional, path, "optional directly wraps optional"};
    } else {
      return derive_node<inner, Visiting...>(path);
    }
  } else {
    return derive_node<T, Visiting...>(path);
  }
}

template <class T, class... Visiting>
constexpr ShapeResult derive_record(const StructuralPath& path) {
  constexpr auto description = shapegate_describe(static_cast<const T*>(nullptr));
  cx::vector<FieldShape> fields;
  std::optional<ShapeError> error;
  std::apply(
      [&](const auto&... field) {
        auto one = [&](const auto& f) {
          if (error) return;
          using value_type = typename std::remove_cvref_t<decltype(f)>::value_type;
          StructuralPath fpath = path.field(f.name);
          for (const FieldShape& seen : fields) {
            if (seen.name == f.name) {
              error = ShapeError{ShapeErrorKind::DuplicateName, fpath,
                                 cx::string("field name '") + f.name + "' is declared twice"};
              return;
            }
          }
          constexpr bool optional = optional_of<value_type>::value;
          ShapeResult r = derive_field<value_type, T, Visiting...>(fpath);
          if (!r.ok()) {
            error = r.error();
            return;
          }
          fields.push_back(FieldShape{cx::string(f.name), std::move(r.shape()), f.has_default, optional});
        };
        (one(field), ...);
      },
      description.fields);
  if (error) return std::move(*error);
  return ShapeNode::record(std::move(fields));
}

/// Sequence elements and map values: a single Optional wrapper is kept in the shape.
template <class T, class... Visiting>
constexpr ShapeResult derive_slot(const StructuralPath& path) {
  if constexpr (optional_of<T>::value) {
    using inner = typename optional_of<T>::inner;
    if constexpr (optional_of<inner>::value) {
      return ShapeError{ShapeErrorKind::DoubleOptional, path, "optional directly wraps optional"};
    } else {
      ShapeResult r = derive_node<inner, Visiting...>(path);
      if (!r.ok()) return r;
      return ShapeNode::optional(std::move(r.shape()));
    }
  } else {
    return derive_node<T, Visiting...>(path);
  }
}

template <class T, class... Visiting>
constexpr ShapeResult derive_node(const StructuralPath& path) {
  using U = std::remove_cv_t<T>;
  if constexpr (primitive_of<U>::value) {
    return ShapeNode::primitive(primitive_of<U>::kind);
  } else if constexpr (optional_of<U>::value) {
    return unsupported(path, "optional is only allowed at a field root, a sequence element or a map value",
                       type_name<U>());
  } else if constexpr (sequence_of<U>::value) {
    ShapeResult r = derive_slot<typename sequence_of<U>::element, Visiting...>(path.element());
    if (!r.ok()) return r;
    return ShapeNode::sequence(std::move(r.shape()));
  } else if constexpr (mapping_of<U>::value) {
    using key = std::remove_cv_t<typename mapping_of<U>::key>;
    if constexpr (!primitive_of<key>::value) {
      return unsupported(path, "non-atomic map key", display_name<key>());
    } else {
      ShapeResult r = derive_slot<typename mapping_of<U>::mapped, Visiting...>(path.map_value());
      if (!r.ok()) return r;
      return ShapeNode::mapping(primitive_of<key>::kind, std::move(r.shape()));
    }
  } else if constexpr (described_record<U>) {
    if constexpr (is_visiting<U, Visiting...>) {
      return unsupported(path, "recursive record type", display_name<U>());
    } else {
      return derive_record<U, Visiting...>(path);
    }
  } else {
    return unsupported(path, "type outside the supported shape family", type_name<U>());
  }
}

}  // namespace detail

/// Canonical Record shape of a described record type, or the ShapeError
/// naming the offending path and type.
template <class T>
constexpr ShapeResult derive_shape() {
  if constexpr (!detail::described_record<T>) {
    return detail::unsupported({}, "not a described record type (missing SHAPEGATE_RECORD)",
                               detail::type_name<T>());
  } else {
    return detail::derive_record<T>({});
  }
}

template <class T>
constexpr std::string_view record_name() {
  return detail::display_name<T>();
}

}  // namespace shapegate

#define SHAPEGATE_RECORD(Type, ...)                                                      \
  [[maybe_unused]] constexpr auto shapegate_describe(const Type*) {                      \
    using shapegate_self_type = Type;                                                    \
    return ::shapegate::describe_record<Type>(#Type __VA_OPT__(, ) __VA_ARGS__);         \
  }                                                                                      \
  static_assert(true)

#define SHAPEGATE_FIELD(member) \
  ::shapegate::member_field<&shapegate_self_type::member> { #member, false }
#define SHAPEGATE_DEFAULTED(member) \
  ::shapegate::member_field<&shapegate_self_type::member> { #member, true }
#define SHAPEGATE_FIELD_AS(member, name) \
  ::shapegate::member_field<&shapegate_self_type::member> { name, false }
#define SHAPEGATE_DEFAULTED_AS(member, name) \
  ::shapegate::member_field<&shapegate_self_type::member> { name, true }
