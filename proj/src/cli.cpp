// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "c2rope/analysis.hpp"
#include "c2rope/errors.hpp"
#include "c2rope/maskgen.hpp"
#include "c2rope/report.hpp"
#include "c2rope/rotary.hpp"
#include "c2rope/selfcheck.hpp"

namespace c2rope {

void RunConfig::validate() const {
  model.validate();
  layout.validate();
  if (steps == 0) {
    throw ConfigError("steps must be >= 1");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

}  // namespace

GridShape parse_grid(std::string_view text) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string_view::npos) {
    throw ConfigError("grid must look like HxW, got '" + std::string(text) + "'");
  }
  GridShape g{parse_number<std::int64_t>("grid", text.substr(0, sep)),
              parse_number<std::int64_t>("grid", text.substr(sep + 1))};
  g.validate();
  return g;
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "layers") {
      cfg.model.layers = parse_number<std::size_t>(key, value);
    } else if (key == "heads") {
      cfg.model.heads = parse_number<std::size_t>(key, value);
    } else if (key == "head_dim") {
      cfg.model.head_dim = parse_number<std::size_t>(key, value);
    } else if (key == "vocab") {
      cfg.model.vocab = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      cfg.model.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "encoding") {
      cfg.model.encoding = parse_variant(value);
    } else if (key == "mask") {
      cfg.model.mask_kind = parse_mask_kind(value);
    } else if (key == "grid") {
      cfg.layout.grid = parse_grid(value);
    } else if (key == "views") {
      cfg.layout.views = parse_number<std::int64_t>(key, value);
    } else if (key == "text") {
      cfg.layout.text_len = parse_number<std::int64_t>(key, value);
    } else if (key == "steps") {
      cfg.steps = parse_number<std::size_t>(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
}

namespace {

// Collects every output of a command and writes them only once the command
// has fully succeeded.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::filesystem::path& name, std::string content) {
    files_.emplace_back(dir_ / name, std::move(content));
  }
  void add_absolute(std::filesystem::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void commit(std::ostream& out) const {
    for (const auto& [path, content] : files_) {
      atomic_write(path, content);
      out << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

// Flags shared by the model-driven subcommands; each is applied only if
// given, so flags override the config file.
struct ModelFlags {
  std::string config_file;
  std::size_t layers = 0, heads = 0, head_dim = 0, vocab = 0, steps = 0;
  std::string encoding, mask, grid;
  std::int64_t views = 0, text = 0;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
    options = {
        app->add_option("--layers", layers),
        app->add_option("--heads", heads),
        app->add_option("--head-dim", head_dim),
        app->add_option("--vocab", vocab),
        app->add_option("--encoding", encoding, "vanilla|mrope_like|videorope_like|c2rope"),
        app->add_option("--mask", mask, "causal|chebyshev"),
        app->add_option("--grid", grid, "HxW tokens per view"),
        app->add_option("--views", views),
        app->add_option("--text", text, "text tokens"),
        app->add_option("--steps", steps, "generation steps"),
    };
  }

  bool given(std::size_t i) const { return options[i]->count() > 0; }

  RunConfig resolve(std::uint64_t seed, bool seed_given) const {
    RunConfig cfg;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      std::stringstream buf;
      buf << in.rdbuf();
      apply_config_text(cfg, buf.str());
    }
    if (given(0)) cfg.model.layers = layers;
    if (given(1)) cfg.model.heads = heads;
    if (given(2)) cfg.model.head_dim = head_dim;
    if (given(3)) cfg.model.vocab = vocab;
    if (given(4)) cfg.model.encoding = parse_variant(encoding);
    if (given(5)) cfg.model.mask_kind = parse_mask_kind(mask);
    if (given(6)) cfg.layout.grid = parse_grid(grid);
    if (given(7)) cfg.layout.views = views;
    if (given(8)) cfg.layout.text_len = text;
    if (given(9)) cfg.steps = steps;
    if (seed_given) cfg.model.seed = seed;
    cfg.validate();
    return cfg;
  }
};

std::filesystem::path resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) {
    return flag;
  }
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

std::string variant_label(const RunConfig& cfg) {
  return std::string(to_string(cfg.model.encoding)) + "+" +
         std::string(to_string(cfg.model.mask_kind));
}

void add_flow_outputs(OutputSet& files, const std::string& stem, const FlowMap& map,
                      const Provenance& prov, std::string_view title) {
  files.add(stem + ".csv", flow_map_csv(map, prov));
  files.add(stem + ".pgm", flow_map_pgm(map, prov));
  files.add(stem + ".svg", flow_map_svg(map, prov, title));
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triplet rotary indexing, Chebyshev causal masks and decay diagnostics", "c2rope"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::uint64_t seed = 0;
  std::string out_flag;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_flag, std::string("output directory (else $") + kOutputDirEnv +
                                           ", else ./out)");
  };

  std::string grid_text = "4x4";
  std::int64_t views = 1;
  std::int64_t text = 0;
  auto add_layout = [&](CLI::App* sub) {
    sub->add_option("--grid", grid_text, "HxW tokens per view");
    sub->add_option("--views", views, "number of views");
    sub->add_option("--text", text, "number of text tokens");
  };

  auto* indices = app.add_subcommand("indices", "dump triplet indices as CSV");
  add_common(indices);
  add_layout(indices);

  std::string variant_text = "c2rope";
  std::size_t dim = 128;
  double base = 10000.0;
  auto* freq = app.add_subcommand("freq", "dump a frequency allocation as CSV");
  add_common(freq);
  freq->add_option("--variant", variant_text);
  freq->add_option("--dim", dim);
  freq->add_option("--base", base);

  std::string kind_text = "chebyshev";
  auto* mask = app.add_subcommand("mask", "dump an attention mask as CSV and PGM");
  add_common(mask);
  add_layout(mask);
  mask->add_option("--kind", kind_text, "causal|chebyshev");

  std::vector<std::string> variants_text;
  std::int64_t max_delta = 256;
  std::size_t samples = 10000;
  std::string sweep_text = "m";
  std::string pairs_text = "matched";
  auto* decay = app.add_subcommand("decay", "Monte-Carlo long-term decay curves");
  add_common(decay);
  decay->add_option("--variants", variants_text, "variants to sweep (default: all)");
  decay->add_option("--dim", dim);
  decay->add_option("--max-delta", max_delta);
  decay->add_option("--samples", samples);
  decay->add_option("--sweep", sweep_text, "index component to offset: m|x|y");
  decay->add_option("--pairs", pairs_text, "matched|independent");

  auto* spatial = app.add_subcommand("spatial", "spatial decay heatmap around the grid centre");
  add_common(spatial);
  spatial->add_option("--variant", variant_text);
  spatial->add_option("--dim", dim);
  spatial->add_option("--grid", grid_text);
  spatial->add_option("--samples", samples);
  spatial->add_option("--pairs", pairs_text, "matched|independent");

  ModelFlags run_flags;
  std::string trace_dir;
  auto* run = app.add_subcommand("run", "forward pass (and greedy generation) of the toy decoder");
  add_common(run);
  run_flags.attach(run);
  run->add_option("--dump-trace", trace_dir, "write one CSV per layer/head attention map");

  ModelFlags flow_flags;
  auto* flow = app.add_subcommand("flow", "image-to-instruction and image-to-output flow");
  add_common(flow);
  flow_flags.attach(flow);

  ModelFlags compare_flags;
  std::string encoding_a = "vanilla";
  std::string encoding_b = "c2rope";
  std::string mask_a;
  std::string mask_b;
  auto* compare = app.add_subcommand("compare", "run two encodings on identical inputs");
  add_common(compare);
  compare_flags.attach(compare);
  compare->add_option("--encoding-a", encoding_a);
  compare->add_option("--encoding-b", encoding_b);
  compare->add_option("--mask-a", mask_a, "mask for run A (default: config mask)");
  compare->add_option("--mask-b", mask_b, "mask for run B (default: config mask)");

  auto* selfcheck = app.add_subcommand("selfcheck", "run the invariant suite");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    auto seed_given = [&](CLI::App* sub) { return sub->get_option("--seed")->count() > 0; };
    const auto out_dir = resolve_output_dir(out_flag);

    if (indices->parsed()) {
      const MultiViewLayout layout{views, parse_grid(grid_text), text};
      OutputSet files(out_dir);
      files.add("indices.csv", indices_csv(layout));
      files.commit(out);
    } else if (freq->parsed()) {
      const auto alloc = make_allocation(parse_variant(variant_text), dim, base);
      OutputSet files(out_dir);
      files.add("freq_" + variant_text + "_d" + std::to_string(dim) + ".csv",
                allocation_csv(alloc));
      files.commit(out);
    } else if (mask->parsed()) {
      const MultiViewLayout layout{views, parse_grid(grid_text), text};
      const auto kind = parse_mask_kind(kind_text);
      const auto m = build_mask(layout, kind);
      OutputSet files(out_dir);
      files.add("mask_" + kind_text + ".csv", mask_csv(m));
      files.add("mask_" + kind_text + ".pgm", mask_pgm(m));
      files.commit(out);
      out << "visible entries: " << m.visible_count() << '\n';
    } else if (decay->parsed()) {
      std::vector<Variant> variants;
      for (const auto& v : variants_text) {
        variants.push_back(parse_variant(v));
      }
      if (variants.empty()) {
        variants.assign(all_variants().begin(), all_variants().end());
      }
      const DecayOptions opts{Component::m, parse_pair_model(pairs_text), true};
      DecayOptions sweep_opts = opts;
      if (sweep_text == "x") {
        sweep_opts.sweep = Component::x;
      } else if (sweep_text == "y") {
        sweep_opts.sweep = Component::y;
      } else if (sweep_text != "m") {
        throw ConfigError("--sweep must be m, x or y");
      }
      std::vector<DecaySeries> series;
      std::string labels;
      for (Variant v : variants) {
        series.push_back(decay_curve(make_allocation(v, dim), max_delta, samples, seed, sweep_opts));
        labels += (labels.empty() ? "" : "|") + std::string(to_string(v));
      }
      const Provenance prov{seed, labels, "mean_abs_score/" + std::string(to_string(opts.pairs))};
      OutputSet files(out_dir);
      files.add("decay_" + sweep_text + ".csv", decay_csv(series, prov));
      files.commit(out);
      for (const auto& s : series) {
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& b : s.bins) {
          if (b.delta > 0) {
            x.push_back(static_cast<double>(b.delta));
            y.push_back(b.mean_abs_score);
          }
        }
        if (x.size() >= 3) {
          const auto fit = fit_line(x, y);
          out << to_string(s.variant) << ": slope " << fit.slope << ", t " << fit.t_stat << '\n';
        }
      }
    } else if (spatial->parsed()) {
      const auto variant = parse_variant(variant_text);
      const auto result = spatial_decay_map(make_allocation(variant, dim), parse_grid(grid_text),
                                            samples, seed, parse_pair_model(pairs_text));
      const Provenance prov{seed, variant_text, result.map.normalization};
      OutputSet files(out_dir);
      add_flow_outputs(files, "spatial_" + variant_text, result.map, prov,
                       "mean |score| vs key offset (" + variant_text + ")");
      files.commit(out);
      if (result.no_spatial_pairs) {
        out << "warning: " << variant_text << " has no spatial pairs; the map is flat\n";
      }
      out << "max offset t-stat: " << result.max_offset_tstat() << '\n';
    } else if (run->parsed()) {
      const auto cfg = run_flags.resolve(seed, seed_given(run));
      const ToyDecoder model(cfg.model);
      const auto seq = synthetic_sequence(cfg.layout, cfg.model, cfg.model.seed);
      const auto fwd = model.forward(seq);
      const auto gen = model.generate(seq, cfg.steps);
      OutputSet files(out_dir);
      files.add("logits.csv", matrix_csv(fwd.logits));
      std::string tokens = "# seed=" + std::to_string(cfg.model.seed) + " variant=" +
                           variant_label(cfg) + " normalization=none\nstep,token\n";
      for (std::size_t s = 0; s < gen.tokens.size(); ++s) {
        tokens += std::to_string(s + 1) + "," + std::to_string(gen.tokens[s]) + "\n";
      }
      files.add("generated.csv", tokens);
      if (!trace_dir.empty()) {
        for (std::size_t l = 0; l < cfg.model.layers; ++l) {
          for (std::size_t h = 0; h < cfg.model.heads; ++h) {
            files.add_absolute(std::filesystem::path(trace_dir) /
                                   ("trace_l" + std::to_string(l) + "_h" + std::to_string(h) +
                                    ".csv"),
                               matrix_csv(fwd.trace.at(l, h)));
          }
        }
      }
      files.commit(out);
      out << "generated:";
      for (auto t : gen.tokens) {
        out << ' ' << t;
      }
      out << '\n';
    } else if (flow->parsed()) {
      const auto cfg = flow_flags.resolve(seed, seed_given(flow));
      if (cfg.layout.text_len < 1 || cfg.layout.views < 1) {
        throw ConfigError("flow needs at least one view and one text token");
      }
      const ToyDecoder model(cfg.model);
      const auto seq = synthetic_sequence(cfg.layout, cfg.model, cfg.model.seed);
      const auto fwd = model.forward(seq);
      const auto map = info_flow(fwd.trace, cfg.layout);
      const auto gen = model.generate(seq, cfg.steps);
      const auto series = flow_by_position(gen.traces, cfg.layout);
      const Provenance prov{cfg.model.seed, variant_label(cfg), map.normalization};
      OutputSet files(out_dir);
      add_flow_outputs(files, "flow_map", map, prov, "image-to-instruction attention mass");
      files.add("flow_by_position.csv", flow_series_csv(series, prov));
      files.commit(out);
      out << "bottom/top quartile ratio: " << bottom_top_ratio(map.averaged()) << '\n';
    } else if (compare->parsed()) {
      const auto cfg = compare_flags.resolve(seed, seed_given(compare));
      ModelConfig a = cfg.model;
      ModelConfig b = cfg.model;
      a.encoding = parse_variant(encoding_a);
      b.encoding = parse_variant(encoding_b);
      if (!mask_a.empty()) a.mask_kind = parse_mask_kind(mask_a);
      if (!mask_b.empty()) b.mask_kind = parse_mask_kind(mask_b);
      a.validate();
      b.validate();
      // Same seed => same weights and inputs; only encoding and mask differ.
      const ToyDecoder model_a(a);
      const ToyDecoder model_b(b);
      const auto seq = synthetic_sequence(cfg.layout, cfg.model, cfg.model.seed);
      const auto ra = model_a.forward(seq);
      const auto rb = model_b.forward(seq);
      double trace_diff = 0.0;
      for (std::size_t l = 0; l < a.layers; ++l) {
        for (std::size_t h = 0; h < a.heads; ++h) {
          trace_diff = std::max(trace_diff, max_abs_diff(ra.trace.at(l, h), rb.trace.at(l, h)));
        }
      }
      std::ostringstream summary;
      summary << "# seed=" << cfg.model.seed << " variant=" << to_string(a.encoding) << '+'
              << to_string(a.mask_kind) << "|" << to_string(b.encoding) << '+'
              << to_string(b.mask_kind) << " normalization=none\n";
      summary << "metric,value\n";
      summary << "max_abs_logit_diff," << format_double(max_abs_diff(ra.logits, rb.logits))
              << '\n';
      summary << "max_abs_attention_diff," << format_double(trace_diff) << '\n';
      summary << "last_token_argmax_a,"
              << argmax_lowest(ra.logits.row(ra.logits.rows() - 1)) << '\n';
      summary << "last_token_argmax_b,"
              << argmax_lowest(rb.logits.row(rb.logits.rows() - 1)) << '\n';
      if (cfg.layout.text_len > 0 && cfg.layout.views > 0) {
        summary << "flow_bottom_top_ratio_a,"
                << format_double(bottom_top_ratio(info_flow(ra.trace, cfg.layout).averaged()))
                << '\n';
        summary << "flow_bottom_top_ratio_b,"
                << format_double(bottom_top_ratio(info_flow(rb.trace, cfg.layout).averaged()))
                << '\n';
      }
      OutputSet files(out_dir);
      files.add("compare.csv", summary.str());
      files.commit(out);
      out << summary.str();
    } else if (selfcheck->parsed()) {
      bool ok = true;
      for (const auto& r : run_selfcheck()) {
        const char* status = r.informational ? (r.pass ? "INFO-PASS" : "INFO-FAIL")
                                             : (r.pass ? "PASS" : "FAIL");
        out << status << "  " << r.name;
        if (!r.detail.empty()) {
          out << "  [" << r.detail << "]";
        }
        out << '\n';
        ok = ok && (r.pass || r.informational);
      }
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace c2rope
