#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shapegate/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = shapegate::cli;
  CLI::App app{"Structural schema contracts: diff, validate, infer, bench"};
  app.require_subcommand(1);

  std::string left, right, policy, format = "text";
  auto* diff = app.add_subcommand("diff", "Compare a producer schema (left) with a contract schema (right)");
  diff->add_option("--left", left, "Producer schema JSON")->required();
  diff->add_option("--right", right, "Contract schema JSON")->required();
  diff->add_option("--policy", policy, "Compatibility policy")->required();
  diff->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string data, contract;
  auto* validate = app.add_subcommand("validate", "Infer a schema from JSON Lines data and check it against a contract");
  validate->add_option("--data", data, "JSON Lines file")->required();
  validate->add_option("--contract", contract, "Contract schema JSON")->required();
  validate->add_option("--policy", policy, "Compatibility policy")->required();

  auto* infer = app.add_subcommand("infer", "Print the schema inferred from JSON Lines data");
  infer->add_option("--data", data, "JSON Lines file")->required();

  cli::BenchOptions bench;
  bench.toolchain.compiler = SHAPEGATE_BENCH_CXX;
  bench.toolchain.include_dir = SHAPEGATE_BENCH_INCLUDE;
  std::string work_dir;
  auto* bench_cmd = app.add_subcommand("bench", "Run the compile or runtime benchmark suite");
  bench_cmd->add_option("--suite", bench.suite, "compile or runtime")->required();
  bench_cmd->add_option("--sizes", bench.sizes, "Pair counts for the compile suite");
  bench_cmd->add_option("--out", bench.out_path, "Markdown output path (JSON is written next to it)");
  bench_cmd->add_option("--seed", bench.config.seed, "Generator seed");
  bench_cmd->add_option("--width", bench.config.schema_width, "Fields per record");
  bench_cmd->add_option("--depth", bench.config.nesting_depth, "Record nesting depth");
  bench_cmd->add_option("--warmup", bench.config.warmup_iterations, "Warmup batches");
  bench_cmd->add_option("--iterations", bench.config.measured_iterations, "Measured batches");
  bench_cmd->add_option("--repetitions", bench.config.compile_repetitions, "Clean builds per compile cell");
  bench_cmd->add_option("--compiler", bench.toolchain.compiler, "Compiler used by the compile suite");
  bench_cmd->add_option("--work-dir", work_dir, "Scratch directory for generated sources");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kError;
  }

  if (*diff) {
    return cli::cmd_diff(left, right, policy, format == "json" ? cli::Format::Json : cli::Format::Text, std::cout,
                         std::cerr);
  }
  if (*validate) return cli::cmd_validate(data, contract, policy, std::cout, std::cerr);
  if (*infer) return cli::cmd_infer(data, std::cout, std::cerr);
  bench.toolchain.work_dir = work_dir;
  return cli::cmd_bench(bench, std::cout, std::cerr);
}
