// Comparing runtime schemas: the policy validator against the two baseline
// comparators, on a pair that differs only in element nullability.
#include <iostream>

#include <shapegate/runtime_schema.hpp>

int main() {
  using namespace shapegate;
  const char* actual_json = R"({
    "type": "record",
    "fields": [
      {"name": "id", "type": {"type": "int64"}, "nullable": false},
      {"name": "tags", "type": {"type": "array", "element": {"type": "string"}, "containsNull": true},
       "nullable": false}
    ]
  })";
  RuntimeSchema actual = parse_schema(actual_json);
  RuntimeSchema contract{RuntimeType::record({
      {"id", RuntimeType::atomic(PrimitiveKind::Int64), false, false},
      {"tags", RuntimeType::array(RuntimeType::atomic(PrimitiveKind::String), false), false, false},
  })};

  std::cout << "baseline ignore-case/nullability: "
            << (baseline_ignore_case_and_nullability(actual, contract) ? "equal" : "different") << "\n";
  std::cout << "baseline structural: " << (baseline_structurally(actual, contract) ? "equal" : "different") << "\n";
  for (SchemaPolicy policy : {SchemaPolicy::Exact, SchemaPolicy::Backward, SchemaPolicy::Full}) {
    Verdict verdict = validate(actual, contract, policy);
    std::cout << policy_name(policy) << ": " << (verdict.ok() ? "conforms\n" : verdict.report().render());
  }
  std::cout << serialize_schema(contract);
}
