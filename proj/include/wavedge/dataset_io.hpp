#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavedge/image.hpp"

namespace wavedge {

enum class DatasetFormat { Idx, CifarBin, ImageDir };

DatasetFormat parse_format(const std::string& s);  // "idx" | "cifar_bin" | "image_dir"
std::string to_string(DatasetFormat f);

struct ImageShape {
  int width = 0;
  int height = 0;
  int channels = 0;

  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct DatasetManifest {
  DatasetFormat format = DatasetFormat::Idx;
  ImageShape image_shape;
  std::size_t num_items = 0;
  std::vector<std::string> label_names;
  std::vector<std::filesystem::path> source_paths;
};

struct LabeledImage {
  ImageD image;
  int label = 0;
};

/// One item as it comes off a reader, with enough origin information to
/// write it back in the same container layout.
struct DatasetRecord {
  std::size_t index = 0;        // position in the stream
  std::size_t source_file = 0;  // index into manifest.source_paths (CIFAR batches)
  std::string name;             // file stem for image_dir datasets
  LabeledImage item;
};

/// Sequential, bounded-memory pass over a dataset.
class DatasetReader {
 public:
  virtual ~DatasetReader() = default;
  const DatasetManifest& manifest() const { return manifest_; }
  /// Next record, or nullopt at end of stream.
  virtual std::optional<DatasetRecord> next() = 0;

 protected:
  DatasetManifest manifest_;
};

/// Big-endian IDX pair: images magic 0x00000803, labels magic 0x00000801.
std::unique_ptr<DatasetReader> read_idx(const std::filesystem::path& images_path,
                                        const std::filesystem::path& labels_path);

/// CIFAR-10 binary batches: 3073-byte records (label, then 32x32 R, G, B planes).
std::unique_ptr<DatasetReader> read_cifar_bin(const std::vector<std::filesystem::path>& paths);

/// root/<class>/<image>.pgm|.ppm; class index is the lexicographic rank of the directory name.
std::unique_ptr<DatasetReader> read_image_dir(const std::filesystem::path& root);

/// Opens by format. idx takes [images, labels]; cifar_bin takes batch files; image_dir takes [root].
std::unique_ptr<DatasetReader> open_dataset(DatasetFormat format,
                                            const std::vector<std::filesystem::path>& sources);

/// Opens a dataset described by a manifest.json written by DatasetWriter.
std::unique_ptr<DatasetReader> open_manifest(const std::filesystem::path& manifest_path);

enum class OutputCodec { Same, ImageDir };

OutputCodec parse_codec(const std::string& s);  // "same" | "image_dir"

/// What produced an output dataset; recorded in every manifest.
struct Provenance {
  std::string method;
  nlohmann::json params = nlohmann::json::object();
};

inline constexpr const char* kManifestFileName = "manifest.json";

/// Writes records in arrival order. Pixel data is quantized with to_u8.
class DatasetWriter {
 public:
  DatasetWriter(const DatasetManifest& source, std::filesystem::path out_root, OutputCodec codec,
                Provenance provenance);
  ~DatasetWriter();
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  void write(const DatasetRecord& record, const ImageD& image);
  /// Flushes files and writes manifest.json. Returns the manifest of the written dataset.
  DatasetManifest finish();

  std::size_t written() const;
  const std::vector<std::size_t>& label_counts() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

nlohmann::json manifest_to_json(const DatasetManifest& m, const Provenance& provenance,
                                 const std::vector<std::size_t>& label_counts,
                                 const std::filesystem::path& relative_to);

}  // namespace wavedge
