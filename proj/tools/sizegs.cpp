// sizegs: size-targeted compressor for Gaussian-splat point models.
//
// Subcommands: synth, compress, decompress, inspect, rd-sweep.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sizegs/sizegs.hpp"

namespace {

using namespace sizegs;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::infeasible:
    case ErrorKind::invalid_budget:
      return 3;
    case ErrorKind::corrupt_container:
      return 5;
    default:
      return 4;
  }
}

// Accepts plain bytes or decimal KB/MB suffixes (10^3 / 10^6).
std::int64_t parse_byte_size(const std::string& text) {
  std::size_t idx = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &idx);
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_budget, "cannot parse size '" + text + "'");
  }
  std::string suffix = text.substr(idx);
  for (auto& c : suffix) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  double scale = 1.0;
  if (suffix == "KB") scale = 1e3;
  else if (suffix == "MB") scale = 1e6;
  else if (!suffix.empty())
    fail(ErrorKind::invalid_budget, "unknown size suffix '" + suffix + "' (use KB or MB)");
  const double bytes = value * scale;
  if (!(bytes > 0) || bytes > 9e18)
    fail(ErrorKind::invalid_budget, "size '" + text + "' is out of range");
  return static_cast<std::int64_t>(bytes);
}

struct PipelineFlags {
  std::string tau_grid;
  std::size_t blocks = 60;
  int q_max = 16;
  int coord_bits = 16;
  std::string norm = "l2";
  double tolerance = 0.05;
  int max_inner_iters = 8;
  double time_limit_s = 50.0;
  unsigned threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tau-grid", tau_grid,
                    "comma-separated reserve ratios in (0,1], ascending "
                    "(default 0.3..1.0 step 0.1)");
    cmd->add_option("--blocks", blocks, "quantization blocks per channel")
        ->capture_default_str();
    cmd->add_option("--qmax", q_max, "largest candidate bit-width")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    cmd->add_option("--coord-bits", coord_bits, "geometry grid bits per axis")
        ->check(CLI::Range(1, 21))
        ->capture_default_str();
    cmd->add_option("--norm", norm, "loss norm: l1, l2, linf")->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "relative size tolerance")
        ->capture_default_str();
    cmd->add_option("--max-inner-iters", max_inner_iters,
                    "calibration iterations per tau sample")
        ->capture_default_str();
    cmd->add_option("--time-limit", time_limit_s, "solver time limit in seconds")
        ->capture_default_str();
    cmd->add_option("--threads", threads,
                    "worker threads (0 = SIZEGS_THREADS or hardware)");
  }

  SearchConfig to_config(std::int64_t budget) const {
    SearchConfig config;
    config.budget_bytes = budget;
    if (!tau_grid.empty()) {
      config.tau_grid.clear();
      std::stringstream ss(tau_grid);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) config.tau_grid.push_back(std::stod(item));
    }
    config.blocks = blocks;
    config.q_max = q_max;
    config.coord_bits = coord_bits;
    config.norm = norm_from_name(norm);
    config.tolerance = tolerance;
    config.max_inner_iters = max_inner_iters;
    config.time_limit_s = time_limit_s;
    config.threads = threads;
    return config;
  }
};

void print_channel_profile(const GaussianModel& model, const BitAssignment& bits) {
  std::size_t channel = 0;
  std::printf("  channel bit profile:\n");
  for (const auto& group : model.schema) {
    double sum = 0.0;
    for (std::size_t w = 0; w < group.width; ++w)
      for (std::size_t j = 0; j < bits.blocks; ++j) sum += bits.at(channel + w, j);
    channel += group.width;
    std::printf("    %-12s width %-3zu mean %.2f bits\n", group.name.c_str(), group.width,
                sum / static_cast<double>(group.width * bits.blocks));
  }
}

int cmd_synth(const std::string& out_path, const std::string& schema_out,
              std::size_t points, const std::string& profile, std::uint64_t seed,
              bool with_importance) {
  SynthConfig config;
  config.seed = seed;
  config.points = points;
  config.profile = profile;
  config.with_importance = with_importance;
  const GaussianModel model = make_synthetic_model(config);
  save_model(model, out_path);
  if (!schema_out.empty()) save_schema(model.schema, schema_out);
  std::printf("wrote %zu points, %zu channels to %s\n", model.point_count(),
              model.channel_count(), out_path.c_str());
  return 0;
}

int cmd_compress(const std::string& input, const std::string& schema_path,
                 const std::string& budget_text, const std::string& output,
                 const std::string& trace_path, const PipelineFlags& flags) {
  const std::int64_t budget = parse_byte_size(budget_text);
  const GaussianModel model = load_model(input, load_schema(schema_path));
  const SearchConfig config = flags.to_config(budget);
  const SearchOutcome outcome = run_search(model, config);

  write_container(outcome.container, output);
  if (!trace_path.empty()) emit_trace(outcome, trace_path);

  const double rel =
      std::abs(static_cast<double>(outcome.achieved_size - budget)) /
      static_cast<double>(budget);
  std::printf("budget          %lld bytes\n", static_cast<long long>(budget));
  std::printf("achieved        %lld bytes (relative error %.4f)\n",
              static_cast<long long>(outcome.achieved_size), rel);
  std::printf("tau*            %.3f (%zu points kept)\n", outcome.tau_star,
              outcome.points_kept);
  std::printf("total loss      %.6g (%.6g per point, %s norm)\n", outcome.total_loss,
              outcome.per_point_loss, norm_name(config.norm));
  std::printf("inner iters     %d\n", outcome.winning_inner_iters);
  std::printf("status          %s\n", outcome.in_tolerance ? "in-tolerance" : "best-effort");
  print_channel_profile(model, outcome.assignment);
  return outcome.in_tolerance ? 0 : 2;
}

int cmd_decompress(const std::string& input, const std::string& output,
                   const std::string& schema_out) {
  const DecodedContainer decoded = decode_container_file(input);
  save_model(decoded.model, output);
  if (!schema_out.empty()) save_schema(decoded.model.schema, schema_out);
  std::printf("decoded %zu points, %zu channels to %s\n", decoded.model.point_count(),
              decoded.model.channel_count(), output.c_str());
  return 0;
}

int cmd_inspect(const std::string& input) {
  const auto bytes = read_file(input);
  const DecodedContainer decoded = decode_container(bytes);
  const auto& h = decoded.header;
  std::printf("container       %s (%zu bytes)\n", input.c_str(), bytes.size());
  std::printf("version         %u\n", h.version);
  std::printf("points          %llu\n", static_cast<unsigned long long>(h.point_count));
  std::printf("channels x blocks  %u x %u\n", h.channels, h.blocks);
  std::printf("coord bits      %u\n", h.coord_bits);
  std::printf("norm            %s\n", norm_name(static_cast<Norm>(h.norm_id)));
  std::printf("schema digest   %016llx\n", static_cast<unsigned long long>(h.schema_digest));
  std::printf("sections        header %zu, geometry %zu, metadata %zu, attributes %zu\n",
              kHeaderBytes, decoded.diagnostics.geometry_section_bytes,
              decoded.diagnostics.metadata_section_bytes,
              decoded.diagnostics.attribute_section_bytes);
  std::printf("constant groups %zu of %u\n", decoded.diagnostics.constant_groups,
              h.channels * h.blocks);

  std::size_t hist[kMaxBits + 1] = {};
  for (auto b : decoded.assignment.bits) hist[b]++;
  std::printf("  bit-width histogram:\n");
  for (int b = 1; b <= kMaxBits; ++b)
    if (hist[b]) std::printf("    %2d bits: %zu groups\n", b, hist[b]);
  print_channel_profile(decoded.model, decoded.assignment);
  return 0;
}

int cmd_rd_sweep(const std::string& input, const std::string& schema_path,
                 const std::vector<std::string>& budget_texts, const std::string& output,
                 const PipelineFlags& flags) {
  std::vector<std::int64_t> budgets;
  for (const auto& b : budget_texts) budgets.push_back(parse_byte_size(b));

  const GaussianModel model = load_model(input, load_schema(schema_path));
  std::ofstream out(output);
  if (!out) fail(ErrorKind::io_error, "cannot write " + output);
  out << "budget,achieved,rel_err,tau_star,ppl_l1,ppl_l2,ppl_linf,status\n";
  out.flush();

  bool all_ok = true;
  bool any_row = false;
  char buf[320];
  for (const std::int64_t budget : budgets) {
    try {
      const RdRow row = rd_point(model, flags.to_config(budget), budget);
      std::snprintf(buf, sizeof buf, "%lld,%lld,%.6g,%.6g,%.17g,%.17g,%.17g,%s\n",
                    static_cast<long long>(row.budget),
                    static_cast<long long>(row.achieved), row.rel_err, row.tau_star,
                    row.per_point_l1, row.per_point_l2, row.per_point_linf,
                    row.in_tolerance ? "ok" : "best-effort");
      out << buf;
      out.flush();
      std::fputs(buf, stdout);
      any_row = true;
      all_ok = all_ok && row.in_tolerance;
    } catch (const Error& e) {
      std::snprintf(buf, sizeof buf, "%lld,,,,,,,%s\n", static_cast<long long>(budget),
                    error_kind_name(e.kind()));
      out << buf;
      out.flush();
      std::fprintf(stderr, "budget %lld: %s\n", static_cast<long long>(budget), e.what());
      all_ok = false;
    }
  }
  if (!any_row) return 3;
  return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"size-targeted compressor for Gaussian-splat point models"};
  app.require_subcommand(1);

  std::string input, output, schema_path, schema_out, budget_text, trace_path, profile = "c10";
  std::vector<std::string> budget_texts;
  std::size_t points = 10000;
  std::uint64_t seed = 1;
  bool with_importance = false;
  PipelineFlags flags;

  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic model");
  synth->add_option("--output", output, "output .ply path")->required();
  synth->add_option("--schema-out", schema_out, "write the schema descriptor here");
  synth->add_option("--points", points, "point count")->capture_default_str();
  synth->add_option("--profile", profile, "c10 or c38")->capture_default_str();
  synth->add_option("--seed", seed, "random seed")->capture_default_str();
  synth->add_flag("--importance", with_importance, "emit an importance column");

  auto* compress = app.add_subcommand("compress", "search and compress to a byte budget");
  compress->add_option("--input", input, "input .ply model")->required();
  compress->add_option("--schema", schema_path, "schema descriptor")->required();
  compress->add_option("--budget", budget_text, "target size (bytes, KB, MB)")->required();
  compress->add_option("--output", output, "output container path")->required();
  compress->add_option("--trace", trace_path, "write the per-iteration CSV here");
  flags.attach(compress);

  auto* decompress = app.add_subcommand("decompress", "decode a container to .ply");
  decompress->add_option("--input", input, "input container")->required();
  decompress->add_option("--output", output, "output .ply path")->required();
  decompress->add_option("--schema-out", schema_out, "write the schema descriptor here");

  auto* inspect = app.add_subcommand("inspect", "print container structure and stats");
  inspect->add_option("--input", input, "input container")->required();

  auto* rd = app.add_subcommand("rd-sweep", "rate-distortion rows over a budget list");
  rd->add_option("--input", input, "input .ply model")->required();
  rd->add_option("--schema", schema_path, "schema descriptor")->required();
  rd->add_option("--budgets", budget_texts, "budget list (bytes, KB, MB)")
      ->required()
      ->delimiter(',');
  rd->add_option("--output", output, "output CSV path")->required();
  flags.attach(rd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(output, schema_out, points, profile, seed, with_importance);
    if (compress->parsed())
      return cmd_compress(input, schema_path, budget_text, output, trace_path, flags);
    if (decompress->parsed()) return cmd_decompress(input, output, schema_out);
    if (inspect->parsed()) return cmd_inspect(input);
    if (rd->parsed()) return cmd_rd_sweep(input, schema_path, budget_texts, output, flags);
  } catch (const sizegs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
