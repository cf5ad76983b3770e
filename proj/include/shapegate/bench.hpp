#pragma once

// Benchmark harness: build-time gate overhead over generated schema pairs and
// runtime comparator cost (policy validator vs the two reference baselines).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/utsname.h>

#include <nlohmann/json.hpp>

#include "shapegate/policy.hpp"
#include "shapegate/runtime_schema.hpp"
#include "shapegate/shape.hpp"

namespace shapegate::bench {

struct BenchConfig {
  std::vector<int> pair_counts{10, 25, 50};
  int schema_width = 8;
  int nesting_depth = 2;
  int warmup_iterations = 5;
  int measured_iterations = 30;
  /// Distinct generated pairs the runtime comparators cycle through.
  int runtime_pairs = 16;
  /// Clean rebuilds per (size, gate) cell; the median is reported.
  int compile_repetitions = 1;
  std::uint64_t seed = 42;
};

inline void check_config(const BenchConfig& c) {
  bool ok = c.schema_width > 0 && c.nesting_depth > 0 && c.warmup_iterations > 0 && c.measured_iterations > 0 &&
            c.runtime_pairs > 0 && c.compile_repetitions > 0 && !c.pair_counts.empty();
  for (int n : c.pair_counts) ok = ok && n > 0;
  if (!ok) throw std::invalid_argument("benchmark configuration values must all be positive");
}

struct GeneratedRecord {
  std::string type_name;
  ShapeNode shape;
};

struct SchemaPair {
  GeneratedRecord producer;
  GeneratedRecord contract;
};

namespace detail {

class Generator {
 public:
  Generator(std::uint64_t seed, int width, int depth) : rng_(seed), width_(width), depth_(depth) {}

  ShapeNode record(int level) {
    cx::vector<FieldShape> fields;
    for (int i = 0; i < width_; ++i) {
      FieldShape f;
      f.name = cx::string(name(i));
      if (i == 0 && level < depth_) {
        f.shape = record(level + 1);
      } else if (i == 1) {
        f.shape = ShapeNode::sequence(maybe_optional(primitive()));
      } else if (i == 2) {
        f.shape = ShapeNode::mapping(PrimitiveKind::String, maybe_optional(primitive()));
      } else {
        f.shape = primitive();
      }
      f.is_optional = pick(4) == 0;
      fields.push_back(std::move(f));
    }
    return ShapeNode::record(std::move(fields));
  }

 private:
  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

  std::string name(int index) {
    std::string s;
    for (int k = 0; k < 5; ++k) s += static_cast<char>('a' + pick(26));
    return s + "_" + std::to_string(index);
  }

  ShapeNode primitive() { return ShapeNode::primitive(kAllPrimitiveKinds[pick(8)]); }

  ShapeNode maybe_optional(ShapeNode s) { return pick(2) == 0 ? ShapeNode::optional(std::move(s)) : s; }

  std::mt19937_64 rng_;
  int width_;
  int depth_;
};

inline ShapeNode upper_first(const ShapeNode& s) {
  switch (s.kind()) {
    case NodeKind::Primitive: return s;
    case NodeKind::Optional: return ShapeNode::optional(upper_first(s.child()));
    case NodeKind::Sequence: return ShapeNode::sequence(upper_first(s.child()));
    case NodeKind::Mapping: return ShapeNode::mapping(s.key_kind(), upper_first(s.child()));
    case NodeKind::Record: {
      cx::vector<FieldShape> fields;
      for (const FieldShape& f : s.fields()) {
        std::string name = f.name.str();
        name[0] = static_cast<char>(name[0] - 'a' + 'A');
        fields.push_back(FieldShape{cx::string(name), upper_first(f.shape), f.has_default, f.is_optional});
      }
      return ShapeNode::record(std::move(fields));
    }
  }
  return s;
}

}  // namespace detail

/// Deterministic pair conforming under Exact: the contract repeats the
/// producer with each field name's first letter upper-cased. Every record has
/// one nested record (until `depth` record levels), one sequence field and one
/// mapping field; the remaining fields are primitives.
inline SchemaPair gen_schema_pair(std::uint64_t seed, int width, int depth) {
  detail::Generator gen(seed, width, depth);
  ShapeNode producer = gen.record(1);
  ShapeNode contract = detail::upper_first(producer);
  std::string suffix = std::to_string(seed);
  return {{"Producer" + suffix, std::move(producer)}, {"Contract" + suffix, std::move(contract)}};
}

// ---------------------------------------------------------------------------
// Source generation for the compile suite

namespace detail {

inline std::string cpp_primitive(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Boolean: return "bool";
    case PrimitiveKind::Int32: return "std::int32_t";
    case PrimitiveKind::Int64: return "std::int64_t";
    case PrimitiveKind::Float64: return "double";
    case PrimitiveKind::String: return "std::string";
    case PrimitiveKind::Binary: return "shapegate::binary";
    case PrimitiveKind::Date: return "shapegate::date";
    case PrimitiveKind::Timestamp: return "shapegate::timestamp";
  }
  return "void";
}

class RecordEmitter {
 public:
  explicit RecordEmitter(std::ostringstream& out) : out_(out) {}

  /// Emits `name` (and its nested records first); returns the type name.
  std::string emit(const std::string& name, const ShapeNode& record) {
    std::vector<std::string> members;
    for (const FieldShape& f : record.fields()) {
      std::string type = cpp_type(name + "_" + f.name.str(), f.shape);
      if (f.is_optional) type = "std::optional<" + type + ">";
      members.push_back("  " + type + " " + f.name.str() + "{};\n");
    }
    out_ << "struct " << name << " {\n";
    for (const auto& m : members) out_ << m;
    out_ << "};\nSHAPEGATE_RECORD(" << name;
    for (const FieldShape& f : record.fields()) out_ << ", SHAPEGATE_FIELD(" << f.name.str() << ")";
    out_ << ");\n\n";
    return name;
  }

 private:
  std::string cpp_type(const std::string& nested_name, const ShapeNode& s) {
    switch (s.kind()) {
      case NodeKind::Primitive: return cpp_primitive(s.primitive_kind());
      case NodeKind::Optional: return "std::optional<" + cpp_type(nested_name, s.child()) + ">";
      case NodeKind::Sequence: return "std::vector<" + cpp_type(nested_name, s.child()) + ">";
      case NodeKind::Mapping:
        return "std::map<" + cpp_primitive(s.key_kind()) + ", " + cpp_type(nested_name, s.child()) + ">";
      case NodeKind::Record: return emit(nested_name, s);
    }
    return "void";
  }

  std::ostringstream& out_;
};

}  // namespace detail

/// Translation unit declaring both records of a pair and asserting
/// conformance under Exact (compiled out with SHAPEGATE_DISABLE_STATIC_GATE).
inline std::string pair_source(const SchemaPair& pair, std::size_t index) {
  std::ostringstream out;
  out << "// generated schema pair " << index << "\n"
      << "#include <shapegate/gate.hpp>\n\n"
      << "namespace bench_pair_" << index << " {\n\n";
  detail::RecordEmitter emitter(out);
  emitter.emit(pair.producer.type_name, pair.producer.shape);
  emitter.emit(pair.contract.type_name, pair.contract.shape);
  out << "SHAPEGATE_STATIC_ASSERT_CONFORMS(" << pair.producer.type_name << ", " << pair.contract.type_name
      << ", Exact);\n\n}  // namespace bench_pair_" << index << "\n";
  return out.str();
}

/// Generated sources for `count` pairs; byte-identical for a fixed config.
inline std::vector<std::string> compile_corpus(const BenchConfig& config, int count) {
  std::vector<std::string> files;
  for (int i = 0; i < count; ++i) {
    auto pair = gen_schema_pair(config.seed + static_cast<std::uint64_t>(i), config.schema_width, config.nesting_depth);
    files.push_back(pair_source(pair, static_cast<std::size_t>(i)));
  }
  return files;
}

// ---------------------------------------------------------------------------
// Results

struct Environment {
  std::string os;
  std::string arch;
  std::string compiler;
};

inline Environment current_environment() {
  Environment env;
  utsname u{};
  if (uname(&u) == 0) {
    env.os = std::string(u.sysname) + " " + u.release;
    env.arch = u.machine;
  }
#if defined(__clang__)
  env.compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env.compiler = std::string("gcc ") + __VERSION__;
#endif
  return env;
}

struct CompileRow {
  int pairs = 0;
  double without_gate_s = 0;
  double with_gate_s = 0;
  [[nodiscard]] double delta_s() const { return with_gate_s - without_gate_s; }
  [[nodiscard]] double delta_pct() const { return without_gate_s > 0 ? 100.0 * delta_s() / without_gate_s : 0.0; }
};

struct RuntimeRow {
  std::string name;
  double mean_ns = 0;
  double median_ns = 0;
  double stddev_ns = 0;
  std::size_t batch_size = 0;
  int batches = 0;
};

struct BenchResult {
  std::string suite;
  BenchConfig config;
  Environment environment;
  std::string methodology;
  std::vector<CompileRow> compile_rows;
  std::vector<RuntimeRow> runtime_rows;

  [[nodiscard]] const RuntimeRow* runtime_row(std::string_view name) const {
    for (const auto& r : runtime_rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
  /// Unordered exact mean divided by the ignore-case baseline mean.
  [[nodiscard]] double unordered_to_baseline_ratio() const {
    const RuntimeRow* a = runtime_row("Unordered exact");
    const RuntimeRow* b = runtime_row("Baseline ignore-case");
    return a && b && b->mean_ns > 0 ? a->mean_ns / b->mean_ns : 0.0;
  }
};

// Reference snapshots: local macOS arm64 and hosted Ubuntu x86_64.
struct CompileReference {
  int pairs;
  double local_s, local_pct, ubuntu_s, ubuntu_pct;
};
inline constexpr CompileReference kCompileReference[] = {
    {10, 0.270, 11.8, 0.847, 12.6},
    {25, 0.397, 13.5, 1.000, 11.1},
    {50, 0.513, 13.9, 1.880, 16.6},
};
struct RuntimeReference {
  std::string_view name;
  double local_ns, ubuntu_ns;
};
inline constexpr RuntimeReference kRuntimeReference[] = {
    {"By-position", 116.82, 180.55},
    {"Unordered exact", 4736.41, 8149.74},
    {"Baseline ignore-case", 278.92, 331.42},
    {"Baseline structural", 332.13, 380.36},
};

// ---------------------------------------------------------------------------
// Runtime suite

namespace detail {

struct Stats {
  double mean = 0, median = 0, stddev = 0;
};

inline Stats summarize(std::vector<double> xs) {
  Stats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  s.median = n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  return s;
}

inline RuntimeRow measure(const std::string& name, int warmup, int measured,
                          const std::function<bool(std::size_t)>& op) {
  using clock = std::chrono::steady_clock;
  volatile bool sink = false;
  auto run_batch = [&](std::size_t batch) {
    auto start = clock::now();
    for (std::size_t i = 0; i < batch; ++i) sink = op(i);
    return std::chrono::duration<double, std::nano>(clock::now() - start).count();
  };
  // Grow the batch until one batch takes more than a millisecond.
  std::size_t batch = 1;
  while (run_batch(batch) < 1e6 && batch < (std::size_t{1} << 30)) batch *= 2;
  for (int i = 0; i < warmup; ++i) run_batch(batch);
  std::vector<double> per_op;
  for (int i = 0; i < measured; ++i) per_op.push_back(run_batch(batch) / static_cast<double>(batch));
  (void)sink;
  Stats s = summarize(per_op);
  return RuntimeRow{name, s.mean, s.median, s.stddev, batch, measured};
}

}  // namespace detail

inline BenchResult bench_runtime(const BenchConfig& config) {
  check_config(config);
  std::vector<RuntimeSchema> producers;
  std::vector<RuntimeSchema> contracts;
  for (int i = 0; i < config.runtime_pairs; ++i) {
    auto pair = gen_schema_pair(config.seed + static_cast<std::uint64_t>(i), config.schema_width, config.nesting_depth);
    producers.push_back(schema_for(pair.producer.shape));
    contracts.push_back(schema_for(pair.contract.shape));
  }
  const std::size_t n = producers.size();
  BenchResult result;
  result.suite = "runtime";
  result.config = config;
  result.environment = current_environment();
  result.methodology =
      "steady_clock; batch size doubled until one batch exceeds 1 ms; " + std::to_string(config.warmup_iterations) +
      " warmup batches, " + std::to_string(config.measured_iterations) + " measured batches; " + std::to_string(n) +
      " generated schema pairs (width " + std::to_string(config.schema_width) + ", depth " +
      std::to_string(config.nesting_depth) + ") cycled per operation; single-threaded";
  auto add = [&](const std::string& name, std::function<bool(std::size_t)> op) {
    result.runtime_rows.push_back(
        detail::measure(name, config.warmup_iterations, config.measured_iterations, op));
  };
  add("By-position", [&](std::size_t i) {
    return validate(producers[i % n], contracts[i % n], SchemaPolicy::ExactByPosition).ok();
  });
  add("Unordered exact",
      [&](std::size_t i) { return validate(producers[i % n], contracts[i % n], SchemaPolicy::Exact).ok(); });
  add("Baseline ignore-case",
      [&](std::size_t i) { return baseline_ignore_case_and_nullability(producers[i % n], contracts[i % n]); });
  add("Baseline structural",
      [&](std::size_t i) { return baseline_structurally(producers[i % n], contracts[i % n]); });
  return result;
}

// ---------------------------------------------------------------------------
// Compile suite

struct Toolchain {
  std::string compiler;
  std::string include_dir;
  std::string flags = "-std=c++20 -O0";
  std::filesystem::path work_dir;
};

inline BenchResult bench_compile(const BenchConfig& config, const Toolchain& toolchain) {
  check_config(config);
  namespace fs = std::filesystem;
  fs::path root = toolchain.work_dir.empty() ? fs::temp_directory_path() / "shapegate-bench-compile" : toolchain.work_dir;
  fs::create_directories(root);

  BenchResult result;
  result.suite = "compile";
  result.config = config;
  result.environment = current_environment();
  result.methodology = "each generated pair is its own translation unit; every cell is a clean sequential build of "
                       "all units (" + toolchain.compiler + " " + toolchain.flags +
                       " -c), gate disabled via -DSHAPEGATE_DISABLE_STATIC_GATE; wall clock per build, median of " +
                       std::to_string(config.compile_repetitions) + " repetition(s)";

  for (int count : config.pair_counts) {
    fs::path dir = root / ("pairs-" + std::to_string(count));
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sources = compile_corpus(config, count);
    std::vector<fs::path> files;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      files.push_back(dir / ("pair_" + std::to_string(i) + ".cpp"));
      std::ofstream(files.back()) << sources[i];
    }
    auto build = [&](bool gate) {
      fs::path log = dir / (gate ? "build-gate.log" : "build-nogate.log");
      auto start = std::chrono::steady_clock::now();
      for (const auto& file : files) {
        std::string cmd = toolchain.compiler + " " + toolchain.flags + " -I\"" + toolchain.include_dir + "\"" +
                          (gate ? "" : " -DSHAPEGATE_DISABLE_STATIC_GATE") + " -c \"" + file.string() + "\" -o \"" +
                          (dir / "out.o").string() + "\" > \"" + log.string() + "\" 2>&1";
        if (std::system(cmd.c_str()) != 0) {
          std::ifstream in(log);
          std::stringstream text;
          text << in.rdbuf();
          throw std::runtime_error("compile benchmark build failed for " + file.string() + ":\n" + text.str());
        }
      }
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    std::vector<double> without, with;
    for (int r = 0; r < config.compile_repetitions; ++r) {
      without.push_back(build(false));
      with.push_back(build(true));
    }
    result.compile_rows.push_back(
        CompileRow{count, detail::summarize(without).median, detail::summarize(with).median});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reporting

namespace detail {
inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}
inline std::string signed_fixed(double v, int digits) { return (v >= 0 ? "+" : "") + fixed(v, digits); }
}  // namespace detail

inline std::string to_markdown(const BenchResult& r) {
  using detail::fixed;
  std::ostringstream out;
  out << "Environment: " << r.environment.os << ", " << r.environment.arch << ", " << r.environment.compiler << "\n";
  out << "Seed: " << r.config.seed << ", schema width " << r.config.schema_width << ", nesting depth "
      << r.config.nesting_depth << "\n";
  out << "Methodology: " << r.methodology << "\n\n";
  if (r.suite == "compile") {
    out << "**Compile-time overhead**\n\n";
    out << "| Pairs | Measured (s) | Measured (%) | Local arm64 ref (s) | Local arm64 ref (%) | Ubuntu x86_64 ref (s) | "
           "Ubuntu x86_64 ref (%) |\n";
    out << "|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& row : r.compile_rows) {
      out << "| " << row.pairs << " | " << detail::signed_fixed(row.delta_s(), 3) << " | "
          << fixed(row.delta_pct(), 1);
      const CompileReference* ref = nullptr;
      for (const auto& c : kCompileReference) {
        if (c.pairs == row.pairs) ref = &c;
      }
      if (ref != nullptr) {
        out << " | " << fixed(ref->local_s, 3) << " | " << fixed(ref->local_pct, 1) << " | " << fixed(ref->ubuntu_s, 3)
            << " | " << fixed(ref->ubuntu_pct, 1) << " |\n";
      } else {
        out << " | - | - | - | - |\n";
      }
    }
    out << "\n| Pairs | Without gate (s) | With gate (s) |\n|---:|---:|---:|\n";
    for (const auto& row : r.compile_rows) {
      out << "| " << row.pairs << " | " << fixed(row.without_gate_s, 3) << " | " << fixed(row.with_gate_s, 3) << " |\n";
    }
    bool monotonic = true;
    for (std::size_t i = 1; i < r.compile_rows.size(); ++i) {
      if (r.compile_rows[i].pairs > r.compile_rows[i - 1].pairs &&
          r.compile_rows[i].delta_s() < r.compile_rows[i - 1].delta_s()) {
        monotonic = false;
      }
    }
    if (!monotonic) out << "\nNote: delta did not grow monotonically with pair count in this run.\n";
  } else {
    out << "**Runtime comparator averages**\n\n";
    out << "| Benchmark | Measured (ns) | Median (ns) | Std dev (ns) | Local arm64 ref (ns) | Ubuntu x86_64 ref (ns) |\n";
    out << "|---|---:|---:|---:|---:|---:|\n";
    for (const auto& row : r.runtime_rows) {
      out << "| " << row.name << " | " << fixed(row.mean_ns, 2) << " | " << fixed(row.median_ns, 2) << " | "
          << fixed(row.stddev_ns, 2);
      const RuntimeReference* ref = nullptr;
      for (const auto& c : kRuntimeReference) {
        if (c.name == row.name) ref = &c;
      }
      if (ref != nullptr) {
        out << " | " << fixed(ref->local_ns, 2) << " | " << fixed(ref->ubuntu_ns, 2) << " |\n";
      } else {
        out << " | - | - |\n";
      }
    }
    out << "\nUnordered exact / baseline ignore-case: " << fixed(r.unordered_to_baseline_ratio(), 1)
        << "x (reference snapshots: roughly 17-25x)\n";
  }
  out << "\nReference columns are saved snapshots from two other machines, shown for context only.\n";
  return out.str();
}

inline nlohmann::ordered_json to_json(const BenchResult& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["environment"] = {{"os", r.environment.os}, {"arch", r.environment.arch}, {"compiler", r.environment.compiler}};
  j["config"] = {{"pairCounts", r.config.pair_counts},
                 {"schemaWidth", r.config.schema_width},
                 {"nestingDepth", r.config.nesting_depth},
                 {"warmupIterations", r.config.warmup_iterations},
                 {"measuredIterations", r.config.measured_iterations},
                 {"runtimePairs", r.config.runtime_pairs},
                 {"compileRepetitions", r.config.compile_repetitions},
                 {"seed", r.config.seed}};
  j["methodology"] = r.methodology;
  if (r.suite == "compile") {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.compile_rows) {
      rows.push_back({{"pairs", row.pairs},
                      {"withoutGateSeconds", row.without_gate_s},
                      {"withGateSeconds", row.with_gate_s},
                      {"deltaSeconds", row.delta_s()},
                      {"deltaPercent", row.delta_pct()}});
    }
    j["rows"] = std::move(rows);
  } else {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.runtime_rows) {
      rows.push_back({{"benchmark", row.name},
                      {"meanNs", row.mean_ns},
                      {"medianNs", row.median_ns},
                      {"stddevNs", row.stddev_ns},
                      {"batchSize", row.batch_size},
                      {"batches", row.batches}});
    }
    j["rows"] = std::move(rows);
    j["unorderedToIgnoreCaseRatio"] = r.unordered_to_baseline_ratio();
  }
  return j;
}

}  // namespace shapegate::bench
