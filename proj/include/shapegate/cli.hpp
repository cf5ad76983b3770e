#pragma once

// Command implementations behind the `shapegate` executable. Each command
// writes its report to `out`, diagnostics to `err`, and returns the exit code.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegate/bench.hpp"
#include "shapegate/dataset.hpp"
#include "shapegate/policy.hpp"
#include "shapegate/runtime_schema.hpp"

namespace shapegate::cli {

enum ExitCode : int { kOk = 0, kDrift = 1, kError = 2 };

enum class Format { Text, Json };

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string valid_policy_list() {
  std::string out;
  for (SchemaPolicy p : kAllPolicies) {
    if (!out.empty()) out += ", ";
    out += policy_token(p);
  }
  return out;
}

inline std::optional<SchemaPolicy> policy_or_report(const std::string& token, std::ostream& err) {
  auto policy = parse_policy(token);
  if (!policy) err << "error: unknown policy '" << token << "'; valid policies: " << valid_policy_list() << "\n";
  return policy;
}

inline RuntimeSchema load_schema(const std::string& path) {
  try {
    return parse_schema(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what(),
                     e.line(), e.column(), e.code());
  }
}

inline void print_items(const DriftReport& report, std::ostream& out) {
  for (const DriftItem& item : report.items) out << item.message << "\n";
}

}  // namespace detail

/// Structured form of a verdict; the same fields the text lines carry.
inline nlohmann::ordered_json report_json(const std::string& left, const std::string& right, SchemaPolicy policy,
                                          const Verdict& verdict) {
  nlohmann::ordered_json j;
  j["left"] = left;
  j["right"] = right;
  j["policy"] = std::string(policy_token(policy));
  j["ok"] = verdict.ok();
  auto items = nlohmann::ordered_json::array();
  for (const DriftItem& item : verdict.report().items) {
    items.push_back({{"kind", std::string(drift_kind_name(item.kind))},
                     {"path", render_path(item.path).str()},
                     {"expected", item.expected.str()},
                     {"actual", item.actual.str()},
                     {"message", item.message.str()}});
  }
  j["items"] = std::move(items);
  return j;
}

inline int cmd_diff(const std::string& left, const std::string& right, const std::string& policy_name, Format format,
                    std::ostream& out, std::ostream& err) {
  auto policy = detail::policy_or_report(policy_name, err);
  if (!policy) return kError;
  try {
    RuntimeSchema producer = detail::load_schema(left);
    RuntimeSchema contract = detail::load_schema(right);
    Verdict verdict = validate(producer, contract, *policy);
    if (format == Format::Json) {
      out << report_json(left, right, *policy, verdict).dump(2) << "\n";
    } else {
      out << "diff left=" << left << " (producer) right=" << right << " (contract) policy=" << policy_token(*policy)
          << "\n";
      if (verdict.ok()) {
        out << "OK\n";
      } else {
        detail::print_items(verdict.report(), out);
      }
    }
    return verdict.ok() ? kOk : kDrift;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

inline int cmd_validate(const std::string& data, const std::string& contract_path, const std::string& policy_name,
                        std::ostream& out, std::ostream& err) {
  auto policy = detail::policy_or_report(policy_name, err);
  if (!policy) return kError;
  try {
    RuntimeSchema contract = detail::load_schema(contract_path);
    std::ifstream in(data);
    if (!in) throw std::runtime_error("cannot open " + data);
    Dataset dataset = [&] {
      try {
        return read_jsonl(in);
      } catch (const ParseError& e) {
        throw std::runtime_error(data + ": " + e.what());
      } catch (const InferenceError& e) {
        throw std::runtime_error(data + ": " + e.what());
      }
    }();
    Verdict verdict = validate(dataset.schema(), contract, *policy);
    out << "validate data=" << data << " (producer) contract=" << contract_path << " policy=" << policy_token(*policy)
        << "\n";
    if (verdict.ok()) {
      out << "OK (" << dataset.size() << " rows)\n";
    } else {
      detail::print_items(verdict.report(), out);
    }
    return verdict.ok() ? kOk : kDrift;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

inline int cmd_infer(const std::string& data, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(data);
    if (!in) throw std::runtime_error("cannot open " + data);
    out << serialize_schema(infer_schema(parse_jsonl(in)));
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << data << ": " << e.what() << "\n";
    return kError;
  }
}

/// "10,25,50" -> {10, 25, 50}; nullopt on anything else.
inline std::optional<std::vector<int>> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty() || part.size() > 6 || part.find_first_not_of("0123456789") != std::string::npos) {
      return std::nullopt;
    }
    int n = std::stoi(part);
    if (n <= 0) return std::nullopt;
    sizes.push_back(n);
  }
  if (sizes.empty() || text.back() == ',') return std::nullopt;
  return sizes;
}

struct BenchOptions {
  std::string suite;
  std::string sizes = "10,25,50";
  std::string out_path;
  bench::BenchConfig config;
  bench::Toolchain toolchain;
};

inline int cmd_bench(BenchOptions options, std::ostream& out, std::ostream& err) {
  if (options.suite != "runtime" && options.suite != "compile") {
    err << "error: unknown suite '" << options.suite << "'; valid suites: compile, runtime\n";
    return kError;
  }
  auto sizes = parse_sizes(options.sizes);
  if (!sizes) {
    err << "error: invalid sizes '" << options.sizes << "'; expected comma-separated positive integers\n";
    return kError;
  }
  options.config.pair_counts = *sizes;
  try {
    bench::BenchResult result = options.suite == "runtime" ? bench::bench_runtime(options.config)
                                                           : bench::bench_compile(options.config, options.toolchain);
    std::string table = bench::to_markdown(result);
    out << table;
    if (!options.out_path.empty()) {
      std::filesystem::path md(options.out_path);
      std::ofstream(md) << table;
      std::filesystem::path json = md;
      json.replace_extension(".json");
      std::ofstream(json) << bench::to_json(result).dump(2) << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace shapegate::cli
