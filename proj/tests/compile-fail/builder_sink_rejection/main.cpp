#include <cstdint>
#include <string>
#include <vector>

#include <shapegate/pipeline.hpp>

struct Order {
  std::int64_t id{};
  std::vector<double> prices{};
};
SHAPEGATE_RECORD(Order, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(prices));

struct Invoice {
  std::int64_t id{};
  std::vector<double> prices{};
  std::string currency{};
};
SHAPEGATE_RECORD(Invoice, SHAPEGATE_FIELD(id), SHAPEGATE_FIELD(prices), SHAPEGATE_FIELD(currency));

int main() {
  shapegate::MemorySink out;
  auto report = shapegate::new_pipeline()
                    .source<Order>(shapegate::jsonl_text_source("{\"id\": 1, \"prices\": [1.0]}\n"))
                    .add_sink<Invoice, shapegate::SchemaPolicy::Backward>(out.writer())
                    .run();
  return report.ok() ? 0 : 1;
}
