// Declaring records and checking them against each other at build time.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <shapegate/gate.hpp>

struct OrderEvent {
  std::int64_t order_id{};
  std::string customer{};
  std::optional<std::string> coupon{};
  std::vector<double> prices{};
};
SHAPEGATE_RECORD(OrderEvent, SHAPEGATE_FIELD(order_id), SHAPEGATE_FIELD(customer), SHAPEGATE_FIELD(coupon),
                 SHAPEGATE_FIELD(prices));

// The warehouse contract spells names differently and lists them in another order.
struct WarehouseOrder {
  std::vector<double> Prices{};
  std::int64_t Order_Id{};
  std::string Customer{};
  std::optional<std::string> Coupon{};
};
SHAPEGATE_RECORD(WarehouseOrder, SHAPEGATE_FIELD(Prices), SHAPEGATE_FIELD(Order_Id), SHAPEGATE_FIELD(Customer),
                 SHAPEGATE_FIELD(Coupon));

// An analytics contract that only needs a subset and tolerates a defaulted column.
struct OrderSummary {
  std::int64_t order_id{};
  std::string region{"unknown"};
};
SHAPEGATE_RECORD(OrderSummary, SHAPEGATE_FIELD(order_id), SHAPEGATE_DEFAULTED(region));

SHAPEGATE_STATIC_ASSERT_CONFORMS(OrderEvent, WarehouseOrder, Exact);
SHAPEGATE_STATIC_ASSERT_CONFORMS(OrderEvent, OrderSummary, Backward);

int main() {
  using shapegate::SchemaConforms;
  using shapegate::SchemaPolicy;

  // Uncommenting this line fails the build: the ordered policy sees "Prices" at #0.
  // SHAPEGATE_STATIC_ASSERT_CONFORMS(OrderEvent, WarehouseOrder, ExactOrdered);

  constexpr auto witness = SchemaConforms<OrderEvent, WarehouseOrder, SchemaPolicy::Exact>::witness;
  std::cout << std::hex << "producer " << witness.producer_fingerprint() << " conforms to contract "
            << witness.contract_fingerprint() << std::dec << " under " << shapegate::policy_name(witness.policy())
            << "\n";

  // The same engine runs on demand, returning the full report.
  auto verdict = shapegate::conforms(shapegate::derive_shape<OrderEvent>().shape(),
                                     shapegate::derive_shape<WarehouseOrder>().shape(), SchemaPolicy::ExactOrdered);
  std::cout << verdict.report().render();
}
