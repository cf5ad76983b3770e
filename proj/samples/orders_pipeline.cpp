// A two-stage pipeline: JSON Lines orders are enriched, then written to two
// sinks with different policies. The second input drifts at runtime.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <shapegate/pipeline.hpp>

namespace sg = shapegate;

struct Order {
  std::int64_t id{};
  std::string customer{};
  std::vector<std::optional<double>> prices{};
};
SHAPEGATE_RECORD(Order, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(customer), SHAPEGATE_FIELD(prices));

struct PricedOrder {
  std::int64_t id{};
  std::string customer{};
  std::vector<std::optional<double>> prices{};
  double total{};
};
SHAPEGATE_RECORD(PricedOrder, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(customer), SHAPEGATE_FIELD(prices),
                 SHAPEGATE_FIELD(total));

struct Ledger {
  std::int64_t id{};
  double total{};
};
SHAPEGATE_RECORD(Ledger, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(total));

sg::Dataset add_totals(const sg::Dataset& in) {
  std::vector<sg::RuntimeField> fields = in.schema().fields();
  fields.push_back({"total", sg::RuntimeType::atomic(sg::PrimitiveKind::Float64), false, false});
  std::vector<sg::Row> rows;
  for (sg::Row row : in.rows()) {
    double total = 0;
    for (const sg::Value& p : row[2].second.as<sg::ValueList>()) {
      if (!p.is_null()) total += p.as<double>();
    }
    row.emplace_back("total", total);
    rows.push_back(std::move(row));
  }
  return sg::Dataset(sg::RuntimeSchema{sg::RuntimeType::record(std::move(fields))}, std::move(rows));
}

void run(const std::string& label, const std::string& jsonl) {
  sg::MemorySink full, ledger;
  auto report = sg::new_pipeline()
                    .source<Order>(sg::jsonl_text_source(jsonl), "orders")
                    .transform<PricedOrder>(add_totals, "add-totals")
                    .add_sink<PricedOrder, sg::SchemaPolicy::Exact>(full.writer(), "priced")
                    .add_sink<Ledger, sg::SchemaPolicy::Backward>(ledger.writer(), "ledger")
                    .run();
  std::cout << "== " << label << ": " << sg::run_status_name(report.status) << "\n";
  for (const auto& stage : report.stages) {
    if (stage.drift) std::cout << stage.label << " pin:\n" << stage.drift->render();
  }
  for (const auto& sink : report.sinks) {
    std::cout << sink.label << ": " << sink.rows_written << " rows\n";
    if (sink.drift) std::cout << sink.drift->render();
  }
  std::cout << full.contents();
}

int main() {
  run("clean input",
      "{\"id\": 1, \"customer\": \"ada\", \"prices\": [2.5, null, 4.0]}\n"
      "{\"id\": 2, \"customer\": \"lin\", \"prices\": []}\n");
  // Upstream started sending string ids; the declared type still says int64.
  run("drifted input",
      "{\"id\": \"A-3\", \"customer\": \"kim\", \"prices\": [1.0, null]}\n"
      "{\"id\": \"A-4\", \"customer\": \"joe\", \"prices\": [7.0]}\n");
}
