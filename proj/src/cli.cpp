#include "wavedge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>

#include "wavedge/coeff_dump.hpp"
#include "wavedge/dataset_io.hpp"
#include "wavedge/errors.hpp"
#include "wavedge/pipeline.hpp"
#include "wavedge/pnm.hpp"
#include "wavedge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wavedge {

namespace {

/// Effective configuration after defaults, config file and flags are merged.
struct RunConfig {
  std::string command;
  int levels = 2;
  std::string renorm = "rescale";
  double sigma = 1.0;
  std::string threshold = "quantile:0.75";
  std::string inject = "mask";
  std::string method = "mm";
  std::string codec = "same";
  std::string format;
  std::vector<std::string> sources;
  std::string manifest;
  std::string input;
  std::string output;
  std::string dump_dir;
  int workers = 1;
};

/// Flag values as parsed; unset flags fall back to the config file, then defaults.
struct Flags {
  std::optional<std::string> config;
  std::optional<int> levels;
  std::optional<std::string> renorm;
  std::optional<double> sigma;
  std::optional<std::string> threshold;
  std::optional<std::string> inject;
  std::optional<std::string> method;
  std::optional<std::string> codec;
  std::optional<std::string> format;
  std::vector<std::string> sources;
  std::optional<std::string> manifest;
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> dump_dir;
  std::optional<int> workers;
};

template <typename T>
void overlay(T& dst, const json& cfg, const char* key) {
  if (!cfg.contains(key)) return;
  try {
    dst = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
void overlay(T& dst, const std::optional<T>& flag) {
  if (flag) dst = *flag;
}

RunConfig merge(const std::string& command, const Flags& f) {
  RunConfig c;
  c.command = command;
  if (f.config) {
    const auto bytes = read_file(*f.config);
    json cfg;
    try {
      cfg = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
      throw ParameterError("config file '" + *f.config + "': " + e.what());
    }
    if (!cfg.is_object()) throw ParameterError("config file must hold a JSON object");
    overlay(c.levels, cfg, "levels");
    overlay(c.renorm, cfg, "renorm");
    overlay(c.sigma, cfg, "sigma");
    overlay(c.threshold, cfg, "threshold");
    overlay(c.inject, cfg, "inject");
    overlay(c.method, cfg, "method");
    overlay(c.codec, cfg, "codec");
    overlay(c.format, cfg, "format");
    overlay(c.sources, cfg, "sources");
    overlay(c.manifest, cfg, "manifest");
    overlay(c.input, cfg, "input");
    overlay(c.output, cfg, "output");
    overlay(c.dump_dir, cfg, "dump_dir");
    overlay(c.workers, cfg, "workers");
  }
  overlay(c.levels, f.levels);
  overlay(c.renorm, f.renorm);
  overlay(c.sigma, f.sigma);
  overlay(c.threshold, f.threshold);
  overlay(c.inject, f.inject);
  overlay(c.method, f.method);
  overlay(c.codec, f.codec);
  overlay(c.format, f.format);
  if (!f.sources.empty()) c.sources = f.sources;
  overlay(c.manifest, f.manifest);
  overlay(c.input, f.input);
  overlay(c.output, f.output);
  overlay(c.dump_dir, f.dump_dir);
  overlay(c.workers, f.workers);
  if (c.workers < 1) throw ParameterError("workers must be >= 1");
  return c;
}

EnhanceSpec spec_from(const RunConfig& c, Method method) {
  EnhanceSpec s;
  s.method = method;
  if (c.levels < 1) throw ParameterError("levels must be >= 1");
  s.naive.levels = c.levels;
  s.naive.renormalize = parse_renormalize(c.renorm);
  if (!(c.sigma > 0.0)) throw ParameterError("sigma must be > 0");
  s.mm.sigma = c.sigma;
  s.mm.threshold = parse_threshold(c.threshold);
  s.mm.injection = parse_injection(c.inject);
  return s;
}

void require_input(const RunConfig& c) {
  if (c.input.empty()) throw ParameterError(c.command + ": an input image is required");
}

int cmd_decompose(const RunConfig& c, std::ostream& out) {
  require_input(c);
  const ImageD img = read_pnm(c.input);
  check_levels(c.levels, img.width(), img.height());
  const auto pyramids = decompose(img, c.levels);
  const auto energies = dump_pyramids(pyramids, c.dump_dir);

  double input_energy = 0.0;
  for (const auto& p : img.planes()) input_energy += p.squaredNorm();
  double total = 0.0;
  out << std::setprecision(17);
  out << "channel level band energy\n";
  for (const auto& e : energies) {
    out << e.channel << ' ' << e.level << ' ' << e.band << ' ' << e.energy << '\n';
    total += e.energy;
  }
  out << "subband_total " << total << '\n';
  out << "input_energy " << input_energy << '\n';
  return kExitOk;
}

/// Plane mapped for viewing: affine min-max for signed fields, else divided by `scale`.
Plane<double> for_display(const Plane<double>& p, double scale, bool signed_field) {
  if (signed_field) return rescale_unit(ImageD::from_plane(p)).plane(0);
  if (!(scale > 0.0)) return Plane<double>::Zero(p.rows(), p.cols());
  return (p / scale).cwiseMin(1.0);
}

void dump_stages(const fs::path& dir, const ImageD& img, const MMConfig& cfg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  for (int ch = 0; ch < img.channels(); ++ch) {
    const auto s = enhance_mm_plane(img.plane(ch), cfg);
    const double mod_max = s.field.modulus.maxCoeff();
    const std::string suffix = img.channels() == 1 ? "" : "_c" + std::to_string(ch);
    auto put = [&](const char* name, const Plane<double>& p) {
      write_pnm(dir / (std::string(name) + suffix + ".pgm"), ImageD::from_plane(p));
    };
    put("01_smoothed", s.smoothed);
    put("02_wx", for_display(s.quad.vert, 0, true));
    put("03_wy", for_display(s.quad.horiz, 0, true));
    put("04_modulus", for_display(s.field.modulus, mod_max, false));
    put("05_nms", for_display(s.maxima.values, mod_max, false));
    put("06_thresholded", for_display(s.thresholded.values, mod_max, false));
    put("07_final", s.reconstructed.cwiseMax(0.0).cwiseMin(1.0));
  }
}

int cmd_enhance(const RunConfig& c, Method method, std::ostream& out) {
  require_input(c);
  if (c.output.empty()) throw ParameterError(c.command + ": --output is required");
  const EnhanceSpec spec = spec_from(c, method);
  const ImageD img = read_pnm(c.input);
  const ImageD result = apply(spec, img);
  write_pnm(c.output, result);
  if (method == Method::ModulusMaxima && !c.dump_dir.empty()) dump_stages(c.dump_dir, img, spec.mm);
  out << json{{"input", c.input}, {"output", c.output}, {"enhancement",
              {{"method", provenance_of(spec).method}, {"params", provenance_of(spec).params}}}}
             .dump()
      << '\n';
  return kExitOk;
}

std::unique_ptr<DatasetReader> open_input(const RunConfig& c) {
  if (!c.manifest.empty()) return open_manifest(c.manifest);
  if (c.format.empty() || c.sources.empty()) {
    throw ParameterError(c.command + ": give --manifest, or --format with --source");
  }
  std::vector<fs::path> sources(c.sources.begin(), c.sources.end());
  return open_dataset(parse_format(c.format), sources);
}

int cmd_batch(const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) throw ParameterError("batch: --out is required");
  const EnhanceSpec spec = spec_from(c, parse_method(c.method));
  const OutputCodec codec = parse_codec(c.codec);
  auto reader = open_input(c);
  DatasetWriter writer(reader->manifest(), c.output, codec, provenance_of(spec));
  BatchOptions opts;
  opts.workers = c.workers;
  const BatchStats stats = run_batch(*reader, writer, spec, opts);
  writer.finish();

  const Provenance prov = provenance_of(spec);
  json summary = {{"items", stats.items},
                  {"items_per_second", stats.items_per_second()},
                  {"seconds",
                   {{"read", stats.read_seconds},
                    {"enhance", stats.enhance_seconds},
                    {"write", stats.write_seconds},
                    {"total", stats.total_seconds}}},
                  {"workers", c.workers},
                  {"codec", c.codec},
                  {"enhancement", {{"method", prov.method}, {"params", prov.params}}},
                  {"manifest", (fs::path(c.output) / kManifestFileName).string()}};
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_inspect(const RunConfig& c, std::ostream& out) {
  if (!c.input.empty()) {
    const ImageD img = read_pnm(c.input);
    double lo = img.plane(0).minCoeff();
    double hi = img.plane(0).maxCoeff();
    for (const auto& p : img.planes()) {
      lo = std::min(lo, p.minCoeff());
      hi = std::max(hi, p.maxCoeff());
    }
    out << json{{"width", img.width()},
                {"height", img.height()},
                {"channels", img.channels()},
                {"min", lo},
                {"max", hi},
                {"max_levels", max_levels(img.width(), img.height())}}
               .dump(2)
        << '\n';
    return kExitOk;
  }
  auto reader = open_input(c);
  out << manifest_to_json(reader->manifest(), Provenance{"none", json::object()}, {}, {}).dump(2)
      << '\n';
  return kExitOk;
}

void add_naive_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--levels,-J", f.levels, "Decomposition depth J (default 2)");
  cmd->add_option("--renorm", f.renorm, "Output mapping: rescale | clamp (default rescale)");
}

void add_mm_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--sigma", f.sigma, "Gaussian smoothing std-dev (default 1.0)");
  cmd->add_option("--threshold", f.threshold, "fixed:T | quantile:Q (default quantile:0.75)");
  cmd->add_option("--inject", f.inject, "Edge injection: mask | angle (default mask)");
}

void add_dataset_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--format", f.format, "Input format: idx | cifar_bin | image_dir");
  cmd->add_option("--source", f.sources,
                  "Input files (idx: images then labels; cifar_bin: batches; image_dir: root)");
  cmd->add_option("--manifest", f.manifest, "Read the input dataset from a manifest.json");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet edge enhancement for image datasets", "wavedge"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON file with default parameters (flags take precedence)");

  auto* decompose_cmd = app.add_subcommand("decompose", "Multilevel Haar decomposition of one image");
  decompose_cmd->add_option("input", f.input, "Input PGM/PPM")->required();
  decompose_cmd->add_option("--levels,-J", f.levels, "Decomposition depth J (default 2)");
  decompose_cmd->add_option("--dump", f.dump_dir, "Directory for WVQ1 subband files");

  auto* naive_cmd = app.add_subcommand("enhance-naive", "Detail-only reconstruction of one image");
  naive_cmd->add_option("input", f.input, "Input PGM/PPM")->required();
  naive_cmd->add_option("--output,-o", f.output, "Output PGM/PPM");
  add_naive_flags(naive_cmd, f);

  auto* mm_cmd = app.add_subcommand("enhance-mm", "Modulus-maxima edge enhancement of one image");
  mm_cmd->add_option("input", f.input, "Input PGM/PPM")->required();
  mm_cmd->add_option("--output,-o", f.output, "Output PGM/PPM");
  mm_cmd->add_option("--dump-stages", f.dump_dir, "Write NN_stage.pgm intermediates here");
  add_mm_flags(mm_cmd, f);

  auto* batch_cmd = app.add_subcommand("batch", "Enhance a whole dataset");
  add_dataset_flags(batch_cmd, f);
  batch_cmd->add_option("--method", f.method, "identity | naive | mm (default mm)");
  batch_cmd->add_option("--out", f.output, "Output dataset root");
  batch_cmd->add_option("--workers,-j", f.workers, "Worker threads (default 1)");
  batch_cmd->add_option("--codec", f.codec, "same | image_dir (default same)");
  add_naive_flags(batch_cmd, f);
  add_mm_flags(batch_cmd, f);

  auto* inspect_cmd = app.add_subcommand("inspect", "Describe an image or dataset");
  inspect_cmd->add_option("input", f.input, "Image to describe");
  add_dataset_flags(inspect_cmd, f);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParameter;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const RunConfig cfg = merge(name, f);
    if (name == "decompose") return cmd_decompose(cfg, out);
    if (name == "enhance-naive") return cmd_enhance(cfg, Method::Naive, out);
    if (name == "enhance-mm") return cmd_enhance(cfg, Method::ModulusMaxima, out);
    if (name == "batch") return cmd_batch(cfg, out);
    return cmd_inspect(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFormat;
  }
}

}  // namespace wavedge
