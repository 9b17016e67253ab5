#include "wavedge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>
#include <vector>

namespace wavedge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int code_of(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const Error& e) {
    return e.exit_code();
  } catch (const ContractViolation&) {
    return 2;
  } catch (...) {
    return 3;
  }
}

std::string what_of(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "identity") return Method::Identity;
  if (s == "naive") return Method::Naive;
  if (s == "mm") return Method::ModulusMaxima;
  throw ParameterError("unknown method '" + s + "' (identity | naive | mm)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Identity: return "identity";
    case Method::Naive: return "naive";
    case Method::ModulusMaxima: return "mm";
  }
  return "?";
}

ImageD apply(const EnhanceSpec& spec, const ImageD& img) {
  switch (spec.method) {
    case Method::Identity: return img;
    case Method::Naive: return enhance_naive(img, spec.naive);
    case Method::ModulusMaxima: return enhance_mm(img, spec.mm);
  }
  return img;
}

Provenance provenance_of(const EnhanceSpec& spec) {
  Provenance p{to_string(spec.method), nlohmann::json::object()};
  if (spec.method == Method::Naive) {
    p.params = {{"levels", spec.naive.levels}, {"renorm", to_string(spec.naive.renormalize)}};
  } else if (spec.method == Method::ModulusMaxima) {
    nlohmann::json threshold;
    if (const auto* f = std::get_if<FixedThreshold>(&spec.mm.threshold)) {
      threshold = {{"policy", "fixed"}, {"value", f->value}};
    } else {
      threshold = {{"policy", "quantile"}, {"value", std::get<QuantileThreshold>(spec.mm.threshold).q}};
    }
    p.params = {{"sigma", spec.mm.sigma},
                {"levels", 1},
                {"threshold", threshold},
                {"injection", to_string(spec.mm.injection)},
                {"output_mapping", "clamp"}};
  }
  return p;
}

BatchStats run_batch(DatasetReader& reader, DatasetWriter& writer, const EnhanceSpec& spec,
                     const BatchOptions& options) {
  if (options.workers < 1) throw ParameterError("workers must be >= 1");
  const auto workers = static_cast<std::size_t>(options.workers);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_per_worker) * workers;

  BatchStats stats;
  const auto t_start = Clock::now();
  std::vector<DatasetRecord> in;
  std::vector<ImageD> out;
  std::vector<std::exception_ptr> errors;

  for (;;) {
    auto t0 = Clock::now();
    in.clear();
    while (in.size() < chunk) {
      auto rec = reader.next();
      if (!rec) break;
      in.push_back(std::move(*rec));
    }
    stats.read_seconds += seconds_since(t0);
    if (in.empty()) break;

    t0 = Clock::now();
    out.assign(in.size(), ImageD{});
    errors.assign(in.size(), nullptr);
    auto work = [&](std::size_t first) {
      for (std::size_t i = first; i < in.size(); i += workers) {
        try {
          out[i] = apply(spec, in[i].item.image);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    stats.enhance_seconds += seconds_since(t0);
    stats.max_in_flight = std::max(stats.max_in_flight, in.size());
    if (options.on_chunk) options.on_chunk(in.size());

    t0 = Clock::now();
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (errors[i]) throw RecordFailure(in[i].index, code_of(errors[i]), what_of(errors[i]));
      writer.write(in[i], out[i]);
    }
    stats.items += in.size();
    stats.write_seconds += seconds_since(t0);
  }
  stats.total_seconds = seconds_since(t_start);
  return stats;
}

}  // namespace wavedge
