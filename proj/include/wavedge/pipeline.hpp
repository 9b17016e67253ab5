#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <json.hpp>

#include "wavedge/dataset_io.hpp"
#include "wavedge/mm_enhance.hpp"
#include "wavedge/naive_enhance.hpp"

namespace wavedge {

enum class Method { Identity, Naive, ModulusMaxima };

Method parse_method(const std::string& s);  // "identity" | "naive" | "mm"
std::string to_string(Method m);

/// A fully specified per-image enhancement.
struct EnhanceSpec {
  Method method = Method::ModulusMaxima;
  NaiveConfig naive;
  MMConfig mm;
};

ImageD apply(const EnhanceSpec& spec, const ImageD& img);

/// Provenance record: method name plus only the parameters that method uses.
Provenance provenance_of(const EnhanceSpec& spec);

struct BatchOptions {
  int workers = 1;
  std::size_t chunk_per_worker = 64;
  /// Called after each chunk with the number of images held in memory; for tests.
  std::function<void(std::size_t in_flight)> on_chunk;
};

struct BatchStats {
  std::size_t items = 0;
  double read_seconds = 0.0;
  double enhance_seconds = 0.0;
  double write_seconds = 0.0;
  double total_seconds = 0.0;
  std::size_t max_in_flight = 0;

  double items_per_second() const { return total_seconds > 0 ? items / total_seconds : 0.0; }
};

/// A record that failed during a batch; carries the failing stream index.
class RecordFailure : public Error {
 public:
  RecordFailure(std::size_t index, int code, const std::string& what)
      : Error("record " + std::to_string(index) + ": " + what), index_(index), code_(code) {}
  std::size_t index() const { return index_; }
  int exit_code() const noexcept override { return code_; }

 private:
  std::size_t index_;
  int code_;
};

/// Enhances every record of `reader` and writes them through `writer` in input order.
/// Work is split per image over `workers` threads; output does not depend on the worker count.
BatchStats run_batch(DatasetReader& reader, DatasetWriter& writer, const EnhanceSpec& spec,
                     const BatchOptions& options = {});

}  // namespace wavedge
