#pragma once

// Static gate: proves at compile time that a described producer record type
// conforms to a described contract record type under a policy. On drift the
// build fails; every report line is instantiated as
//
//   shapegate::schema_drift<fixed_text<N>{"MissingField at email: expected ..."}>
//
// so the compiler's diagnostic carries the full path-rich drift report.

#include <cstddef>
#include <string_view>
#include <utility>

#include "shapegate/policy.hpp"
#include "shapegate/reflect.hpp"
#include "shapegate/shape.hpp"

namespace shapegate {

template <std::size_t N>
struct fixed_text {
  char chars[N + 1]{};

  constexpr fixed_text() = default;
  constexpr explicit fixed_text(std::string_view s) {
    for (std::size_t i = 0; i < N && i < s.size(); ++i) chars[i] = s[i];
  }
  [[nodiscard]] constexpr std::string_view view() const { return {chars, N}; }
  [[nodiscard]] static constexpr std::size_t size() { return N; }
};

namespace detail {

/// Gate outcome rendered as text: empty on conformance, otherwise a header
/// line followed by one line per drift item (or the ShapeError message).
template <class Producer, class Contract, SchemaPolicy Policy>
constexpr cx::string gate_report() {
  ShapeResult producer = derive_shape<Producer>();
  ShapeResult contract = derive_shape<Contract>();
  cx::string out;
  auto header = [&](std::string_view what) {
    out += what;
    out += ' ';
    out += record_name<Producer>();
    out += " -> ";
    out += record_name<Contract>();
    out += " under ";
    out += policy_name(Policy);
    out += '\n';
  };
  if (!producer.ok() || !contract.ok()) {
    header("unsupported shape in");
    if (!producer.ok()) {
      out += "producer ";
      out += producer.error().message();
      out += '\n';
    }
    if (!contract.ok()) {
      out += "contract ";
      out += contract.error().message();
      out += '\n';
    }
    return out;
  }
  Verdict verdict = conforms(producer.shape(), contract.shape(), Policy);
  if (verdict.ok()) return out;
  header("schema drift in");
  out += verdict.report().render();
  return out;
}

template <class Producer, class Contract, SchemaPolicy Policy>
inline constexpr std::size_t gate_report_size = gate_report<Producer, Contract, Policy>().size();

template <class Producer, class Contract, SchemaPolicy Policy>
inline constexpr fixed_text<gate_report_size<Producer, Contract, Policy>> gate_report_text{
    gate_report<Producer, Contract, Policy>().view()};

template <const auto& Text>
constexpr std::size_t line_count() {
  std::size_t n = 0;
  for (char c : Text.view()) n += c == '\n' ? 1 : 0;
  return n;
}

template <const auto& Text, std::size_t Line>
constexpr std::string_view line_at() {
  std::string_view s = Text.view();
  for (std::size_t i = 0; i < Line; ++i) s.remove_prefix(s.find('\n') + 1);
  return s.substr(0, s.find('\n'));
}

template <const auto& Text, std::size_t Line>
inline constexpr fixed_text<line_at<Text, Line>().size()> report_line{line_at<Text, Line>()};

template <class Producer, class Contract, SchemaPolicy Policy>
constexpr Witness mint_static_witness() {
  ShapeResult producer = derive_shape<Producer>();
  ShapeResult contract = derive_shape<Contract>();
  // A non-conforming triple has already failed the build through the report
  // assertion; the placeholder only keeps the diagnostics to the drift lines.
  if (!producer.ok() || !contract.ok()) return WitnessMint::mint(0, 0, Policy);
  Verdict verdict = conforms(producer.shape(), contract.shape(), Policy);
  if (!verdict.ok()) return WitnessMint::mint(0, 0, Policy);
  return verdict.witness();
}

}  // namespace detail

template <auto Line>
struct schema_drift {
  static_assert(Line.size() == 0, "schema contract violated (drift line in the template argument above)");
  static constexpr bool reported = true;
};

namespace detail {
template <const auto& Text, std::size_t... Lines>
constexpr bool report_all_lines(std::index_sequence<Lines...>) {
  return (schema_drift<report_line<Text, Lines>>::reported && ... && true);
}
}  // namespace detail

/// Compile-time conformance evidence for (Producer, Contract, Policy).
/// Naming SchemaConforms<...>::witness in a constant expression fails the
/// build with the drift report when the pair does not conform.
template <class Producer, class Contract, SchemaPolicy Policy>
struct SchemaConforms {
  using producer_type = Producer;
  using contract_type = Contract;
  static constexpr SchemaPolicy policy = Policy;

  static constexpr const auto& report = detail::gate_report_text<Producer, Contract, Policy>;
  static constexpr bool conforming = report.size() == 0;
  static_assert(detail::report_all_lines<detail::gate_report_text<Producer, Contract, Policy>>(
      std::make_index_sequence<detail::line_count<detail::gate_report_text<Producer, Contract, Policy>>()>{}));

  static constexpr Witness witness = detail::mint_static_witness<Producer, Contract, Policy>();
};

/// Build-stage assertion returning the Witness. Usable as
/// `constexpr auto w = static_assert_conforms<Out, Contract, SchemaPolicy::Exact>();`
template <class Producer, class Contract, SchemaPolicy Policy>
consteval Witness static_assert_conforms() {
  return SchemaConforms<Producer, Contract, Policy>::witness;
}

}  // namespace shapegate

#ifdef SHAPEGATE_DISABLE_STATIC_GATE
#define SHAPEGATE_STATIC_ASSERT_CONFORMS(Producer, Contract, Policy) static_assert(true)
#else
#define SHAPEGATE_STATIC_ASSERT_CONFORMS(Producer, Contract, Policy) \
  static_assert(::shapegate::SchemaConforms<Producer, Contract, ::shapegate::SchemaPolicy::Policy>::conforming)
#endif
