#pragma once

// Typestate pipeline builder. The builder's phase is a type parameter, so a
// transform or sink before a source, or a second source, does not compile.
// Typed sinks demand SchemaConforms evidence for the current producer type;
// every sink re-checks the actual runtime schema before writing.

#include <concepts>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "shapegate/dataset.hpp"
#include "shapegate/gate.hpp"
#include "shapegate/policy.hpp"
#include "shapegate/runtime_schema.hpp"
#include "shapegate/shape.hpp"

namespace shapegate {

namespace phase {
struct Empty {};
struct HasSource {};
}  // namespace phase

enum class Phase { Empty, HasSource };

using Reader = std::function<Dataset()>;
using TransformFn = std::function<Dataset(const Dataset&)>;
using Writer = std::function<std::size_t(const Dataset&)>;

/// Raised when a sink is attached with evidence that does not match the
/// current producer shape, the contract shape, or the policy.
class WitnessMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PipelineError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SourceStage {
  Reader reader;
  ShapeNode declared_shape;
  std::string label;
};

struct TransformStage {
  TransformFn fn;
  ShapeNode declared_out_shape;
  std::string label;
};

struct SinkStage {
  Writer writer;
  ShapeNode contract_shape;
  RuntimeSchema contract_schema;
  SchemaPolicy policy;
  Witness witness;
  std::string label;
};

using Stage = std::variant<SourceStage, TransformStage, SinkStage>;

struct BuilderState {
  Phase phase = Phase::Empty;
  std::optional<ShapeNode> current_out_shape;
  std::vector<Stage> stages;
};

enum class StageStatus { Ok, Drift, Error, Skipped };
enum class RunStatus { Ok, SinkDrift, PinAborted, Error };

inline std::string_view run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::SinkDrift: return "sink-drift";
    case RunStatus::PinAborted: return "pin-aborted";
    case RunStatus::Error: return "error";
  }
  return "?";
}

struct StageOutcome {
  std::string label;
  StageStatus status = StageStatus::Skipped;
  std::optional<DriftReport> drift;
  std::string error;
  std::size_t rows = 0;
};

struct SinkOutcome {
  std::string label;
  StageStatus status = StageStatus::Skipped;
  std::size_t rows_written = 0;
  std::optional<DriftReport> drift;
  std::string error;
};

struct RunReport {
  std::vector<StageOutcome> stages;
  std::vector<SinkOutcome> sinks;
  RunStatus status = RunStatus::Ok;

  [[nodiscard]] bool ok() const { return status == RunStatus::Ok; }
};

namespace detail {

inline ShapeNode canonical_record_or_throw(ShapeNode shape, std::string_view what) {
  if (!shape.is(NodeKind::Record)) throw PipelineError(std::string(what) + " shape must be a record");
  ShapeResult r = canonicalize(std::move(shape));
  if (!r.ok()) throw PipelineError(std::string(what) + " shape rejected: " + r.error().message().str());
  return std::move(r.shape());
}

template <class Record>
ShapeNode typed_shape() {
  static_assert(derive_shape<Record>().ok(), "record type is outside the supported shape family");
  return std::move(derive_shape<Record>().shape());
}

inline RunReport execute(const BuilderState& state) {
  RunReport report;
  Dataset current;
  bool halted = false;
  auto halt = [&](RunStatus status) {
    halted = true;
    report.status = status;
  };
  for (const Stage& stage : state.stages) {
    if (const auto* sink = std::get_if<SinkStage>(&stage)) {
      SinkOutcome out;
      out.label = sink->label;
      if (!halted) {
        Verdict verdict = validate(current.schema(), sink->contract_schema, sink->policy);
        if (!verdict.ok()) {
          out.status = StageStatus::Drift;
          out.drift = verdict.report();
          if (report.status == RunStatus::Ok) report.status = RunStatus::SinkDrift;
        } else {
          try {
            out.rows_written = sink->writer(current);
            out.status = StageStatus::Ok;
          } catch (const std::exception& e) {
            out.status = StageStatus::Error;
            out.error = e.what();
            report.status = RunStatus::Error;
          }
        }
      }
      report.sinks.push_back(std::move(out));
      continue;
    }
    StageOutcome out;
    if (const auto* source = std::get_if<SourceStage>(&stage)) {
      out.label = source->label;
      if (!halted) {
        try {
          current = source->reader();
          out.status = StageStatus::Ok;
          out.rows = current.size();
        } catch (const std::exception& e) {
          out.status = StageStatus::Error;
          out.error = e.what();
          halt(RunStatus::Error);
        }
      }
    } else if (const auto* transform = std::get_if<TransformStage>(&stage)) {
      out.label = transform->label;
      if (!halted) {
        try {
          current = transform->fn(current);
          out.rows = current.size();
          // Mid-pipeline pin: unordered, case-insensitive exact comparison.
          Verdict pin = validate(current.schema(), schema_for(transform->declared_out_shape), SchemaPolicy::Exact);
          if (pin.ok()) {
            out.status = StageStatus::Ok;
          } else {
            out.status = StageStatus::Drift;
            out.drift = pin.report();
            halt(RunStatus::PinAborted);
          }
        } catch (const std::exception& e) {
          out.status = StageStatus::Error;
          out.error = e.what();
          halt(RunStatus::Error);
        }
      }
    }
    report.stages.push_back(std::move(out));
  }
  return report;
}

}  // namespace detail

template <class PhaseTag = phase::Empty, class Out = void>
class PipelineBuilder {
  static constexpr bool kHasSource = std::is_same_v<PhaseTag, phase::HasSource>;
  static constexpr bool kEmpty = std::is_same_v<PhaseTag, phase::Empty>;

 public:
  using producer_type = Out;

  PipelineBuilder()
    requires kEmpty
  = default;

  [[nodiscard]] Phase phase() const noexcept { return state_.phase; }
  [[nodiscard]] const BuilderState& state() const noexcept { return state_; }
  [[nodiscard]] std::size_t sink_count() const {
    std::size_t n = 0;
    for (const Stage& s : state_.stages) n += std::holds_alternative<SinkStage>(s) ? 1 : 0;
    return n;
  }

  /// Source with a declared record type.
  template <class Record>
    requires kEmpty
  [[nodiscard]] PipelineBuilder<phase::HasSource, Record> source(Reader reader, std::string label = "source") const {
    return attach_source<Record>(std::move(reader), detail::typed_shape<Record>(), std::move(label));
  }

  /// Source with a declared shape; typed sinks are unavailable downstream.
  [[nodiscard]] PipelineBuilder<phase::HasSource, void> source(Reader reader, ShapeNode declared_shape,
                                                               std::string label = "source") const
    requires kEmpty
  {
    return attach_source<void>(std::move(reader), detail::canonical_record_or_throw(std::move(declared_shape), "source"),
                               std::move(label));
  }

  template <class NewOut>
    requires kHasSource
  [[nodiscard]] PipelineBuilder<phase::HasSource, NewOut> transform(TransformFn fn,
                                                                    std::string label = "transform") const {
    return attach_transform<NewOut>(std::move(fn), detail::typed_shape<NewOut>(), std::move(label));
  }

  [[nodiscard]] PipelineBuilder<phase::HasSource, void> transform(TransformFn fn, ShapeNode declared_out_shape,
                                                                  std::string label = "transform") const
    requires kHasSource
  {
    return attach_transform<void>(
        std::move(fn), detail::canonical_record_or_throw(std::move(declared_out_shape), "transform"), std::move(label));
  }

  /// Sink whose conformance evidence is produced by the static gate; a
  /// non-conforming (Out, Contract, Policy) triple fails the build here.
  template <class Contract, SchemaPolicy Policy>
    requires(kHasSource && !std::is_void_v<Out>)
  [[nodiscard]] PipelineBuilder add_sink(Writer writer, std::string label = "sink") const {
    constexpr Witness witness = SchemaConforms<Out, Contract, Policy>::witness;
    return add_sink(std::move(writer), detail::typed_shape<Contract>(), Policy, witness, std::move(label));
  }

  /// Sink with explicitly passed static evidence.
  template <class Producer, class Contract, SchemaPolicy Policy>
    requires kHasSource
  [[nodiscard]] PipelineBuilder add_sink(Writer writer, SchemaConforms<Producer, Contract, Policy> evidence,
                                         std::string label = "sink") const {
    static_assert(std::is_void_v<Out> || std::is_same_v<Producer, Out>,
                  "WitnessMismatch: evidence was minted for a different producer type than the pipeline's current output");
    return add_sink(std::move(writer), detail::typed_shape<Contract>(), Policy, decltype(evidence)::witness,
                    std::move(label));
  }

  /// Sink with a runtime witness; the witness is re-verified against the
  /// current producer shape, the contract shape, and the policy.
  [[nodiscard]] PipelineBuilder add_sink(Writer writer, ShapeNode contract_shape, SchemaPolicy policy,
                                         const Witness& witness, std::string label = "sink") const
    requires kHasSource
  {
    ShapeNode contract = detail::canonical_record_or_throw(std::move(contract_shape), "contract");
    const Fingerprint producer_fp = fingerprint(*state_.current_out_shape);
    const Fingerprint contract_fp = fingerprint(contract);
    if (witness.producer_fingerprint() != producer_fp || witness.contract_fingerprint() != contract_fp ||
        witness.policy() != policy) {
      std::ostringstream msg;
      msg << "WitnessMismatch at sink '" << label << "': witness binds producer " << std::hex
          << witness.producer_fingerprint() << ", contract " << witness.contract_fingerprint() << ", policy "
          << policy_name(witness.policy()) << "; sink has producer " << producer_fp << ", contract " << contract_fp
          << ", policy " << policy_name(policy);
      throw WitnessMismatch(msg.str());
    }
    PipelineBuilder next = *this;
    RuntimeSchema schema = schema_for(contract);
    next.state_.stages.emplace_back(
        SinkStage{std::move(writer), std::move(contract), std::move(schema), policy, witness, std::move(label)});
    return next;
  }

  [[nodiscard]] RunReport run() const
    requires kHasSource
  {
    if (sink_count() == 0) throw PipelineError("run requires at least one sink");
    return detail::execute(state_);
  }

 private:
  template <class, class>
  friend class PipelineBuilder;

  template <class NewOut>
  PipelineBuilder<phase::HasSource, NewOut> attach_source(Reader reader, ShapeNode shape, std::string label) const {
    BuilderState next = state_;
    next.phase = Phase::HasSource;
    next.current_out_shape = shape;
    next.stages.emplace_back(SourceStage{std::move(reader), std::move(shape), std::move(label)});
    return PipelineBuilder<phase::HasSource, NewOut>(std::move(next));
  }

  template <class NewOut>
  PipelineBuilder<phase::HasSource, NewOut> attach_transform(TransformFn fn, ShapeNode shape, std::string label) const {
    BuilderState next = state_;
    next.current_out_shape = shape;
    next.stages.emplace_back(TransformStage{std::move(fn), std::move(shape), std::move(label)});
    return PipelineBuilder<phase::HasSource, NewOut>(std::move(next));
  }

  explicit PipelineBuilder(BuilderState state)
    requires kHasSource
      : state_(std::move(state)) {}

  BuilderState state_;
};

inline PipelineBuilder<> new_pipeline() { return {}; }

// ---------------------------------------------------------------------------
// Readers and writers

inline Reader jsonl_file_source(std::filesystem::path path) {
  return [path = std::move(path)] {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_jsonl(in);
  };
}

inline Reader jsonl_text_source(std::string text) {
  return [text = std::move(text)] { return read_jsonl_text(text); };
}

inline Reader dataset_source(Dataset dataset) {
  return [dataset = std::move(dataset)] { return dataset; };
}

/// Opens (and truncates) the file only when a write actually happens.
inline Writer jsonl_file_sink(std::filesystem::path path) {
  return [path = std::move(path)](const Dataset& ds) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return write_jsonl(ds, out);
  };
}

/// In-memory JSONL target; copies share the same buffer.
class MemorySink {
 public:
  [[nodiscard]] Writer writer() const {
    return [buffer = buffer_, writes = writes_](const Dataset& ds) {
      std::ostringstream out;
      std::size_t n = write_jsonl(ds, out);
      *buffer += out.str();
      ++*writes;
      return n;
    };
  }
  [[nodiscard]] const std::string& contents() const { return *buffer_; }
  [[nodiscard]] std::size_t writes() const { return *writes_; }

 private:
  std::shared_ptr<std::string> buffer_ = std::make_shared<std::string>();
  std::shared_ptr<std::size_t> writes_ = std::make_shared<std::size_t>(0);
};

}  // namespace shapegate
