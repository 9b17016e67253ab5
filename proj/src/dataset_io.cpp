#include "wavedge/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>

#include "wavedge/errors.hpp"
#include "wavedge/pnm.hpp"
#include "wavedge/version.hpp"

namespace fs = std::filesystem;

namespace wavedge {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kIdxImageHeader = 16;
constexpr std::size_t kIdxLabelHeader = 8;

constexpr int kCifarSide = 32;
constexpr std::size_t kCifarPixels = 3 * kCifarSide * kCifarSide;
constexpr std::size_t kCifarRecord = 1 + kCifarPixels;

const std::vector<std::string> kCifarClasses = {"airplane", "automobile", "bird",  "cat",
                                                "deer",     "dog",        "frog",  "horse",
                                                "ship",     "truck"};

std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

void store_be32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::uintmax_t file_size_or_throw(const fs::path& path) {
  std::error_code ec;
  const auto n = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path.string() + "': " + ec.message());
  return n;
}

void read_exact(std::ifstream& in, std::uint8_t* dst, std::size_t n, const fs::path& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(path.string() + ": truncated file");
  }
}

std::vector<std::string> numeric_labels(int count) {
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) names.push_back(std::to_string(i));
  return names;
}

class IdxReader final : public DatasetReader {
 public:
  IdxReader(fs::path images, fs::path labels)
      : images_path_(std::move(images)), labels_path_(std::move(labels)) {
    images_ = open_in(images_path_);
    labels_ = open_in(labels_path_);

    std::array<std::uint8_t, kIdxImageHeader> ih{};
    std::array<std::uint8_t, kIdxLabelHeader> lh{};
    read_exact(images_, ih.data(), ih.size(), images_path_);
    read_exact(labels_, lh.data(), lh.size(), labels_path_);
    if (load_be32(ih.data()) != kIdxImageMagic) {
      throw FormatError(images_path_.string() + ": bad IDX image magic");
    }
    if (load_be32(lh.data()) != kIdxLabelMagic) {
      throw FormatError(labels_path_.string() + ": bad IDX label magic");
    }
    const std::uint32_t count = load_be32(ih.data() + 4);
    const std::uint32_t rows = load_be32(ih.data() + 8);
    const std::uint32_t cols = load_be32(ih.data() + 12);
    const std::uint32_t label_count = load_be32(lh.data() + 4);
    if (count != label_count) {
      throw FormatError("IDX count mismatch: " + std::to_string(count) + " images vs " +
                        std::to_string(label_count) + " labels");
    }
    if (count == 0 || rows == 0 || cols == 0 || rows > 1u << 15 || cols > 1u << 15) {
      throw FormatError(images_path_.string() + ": bad IDX dimensions");
    }
    pixels_ = static_cast<std::size_t>(rows) * cols;
    const std::uintmax_t want_images = kIdxImageHeader + std::uintmax_t{count} * pixels_;
    const std::uintmax_t want_labels = kIdxLabelHeader + std::uintmax_t{count};
    if (file_size_or_throw(images_path_) != want_images) {
      throw FormatError(images_path_.string() + ": file size does not match header (truncated?)");
    }
    if (file_size_or_throw(labels_path_) != want_labels) {
      throw FormatError(labels_path_.string() + ": file size does not match header (truncated?)");
    }

    manifest_.format = DatasetFormat::Idx;
    manifest_.image_shape = {static_cast<int>(cols), static_cast<int>(rows), 1};
    manifest_.num_items = count;
    manifest_.label_names = numeric_labels(scan_max_label() + 1);
    manifest_.source_paths = {images_path_, labels_path_};
    buffer_.resize(pixels_);
  }

  std::optional<DatasetRecord> next() override {
    if (index_ == manifest_.num_items) return std::nullopt;
    std::uint8_t label = 0;
    read_exact(labels_, &label, 1, labels_path_);
    read_exact(images_, buffer_.data(), buffer_.size(), images_path_);
    DatasetRecord rec;
    rec.index = index_++;
    rec.item.label = label;
    rec.item.image = from_u8<double>(buffer_, manifest_.image_shape.width,
                                     manifest_.image_shape.height, 1);
    return rec;
  }

 private:
  // Label names need the label range up front; one streaming pass over the label bytes.
  int scan_max_label() {
    std::vector<std::uint8_t> chunk(1 << 16);
    int max_label = 0;
    while (labels_) {
      labels_.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
      const auto got = static_cast<std::size_t>(labels_.gcount());
      for (std::size_t i = 0; i < got; ++i) max_label = std::max<int>(max_label, chunk[i]);
    }
    labels_.clear();
    labels_.seekg(static_cast<std::streamoff>(kIdxLabelHeader));
    return std::max(max_label, 9);
  }

  fs::path images_path_;
  fs::path labels_path_;
  std::ifstream images_;
  std::ifstream labels_;
  std::size_t pixels_ = 0;
  std::size_t index_ = 0;
  std::vector<std::uint8_t> buffer_;
};

class CifarReader final : public DatasetReader {
 public:
  explicit CifarReader(std::vector<fs::path> paths) {
    if (paths.empty()) throw ParameterError("cifar_bin: no batch files given");
    std::size_t total = 0;
    for (const auto& p : paths) {
      const auto size = file_size_or_throw(p);
      if (size == 0 || size % kCifarRecord != 0) {
        throw FormatError(p.string() + ": length " + std::to_string(size) +
                          " is not a positive multiple of " + std::to_string(kCifarRecord));
      }
      counts_.push_back(static_cast<std::size_t>(size / kCifarRecord));
      total += counts_.back();
    }
    manifest_.format = DatasetFormat::CifarBin;
    manifest_.image_shape = {kCifarSide, kCifarSide, 3};
    manifest_.num_items = total;
    manifest_.label_names = kCifarClasses;
    manifest_.source_paths = std::move(paths);
    buffer_.resize(kCifarRecord);
  }

  std::optional<DatasetRecord> next() override {
    while (file_ < counts_.size() && in_file_ == counts_[file_]) {
      ++file_;
      in_file_ = 0;
      stream_.close();
    }
    if (file_ == counts_.size()) return std::nullopt;
    const fs::path& path = manifest_.source_paths[file_];
    if (!stream_.is_open()) stream_ = open_in(path);
    read_exact(stream_, buffer_.data(), buffer_.size(), path);
    if (buffer_[0] >= kCifarClasses.size()) {
      throw FormatError(path.string() + ": record " + std::to_string(in_file_) + " has label " +
                        std::to_string(buffer_[0]) + " (must be < 10)");
    }
    DatasetRecord rec;
    rec.index = index_++;
    rec.source_file = file_;
    rec.item.label = buffer_[0];
    rec.item.image = from_u8<double>(std::span(buffer_).subspan(1), kCifarSide, kCifarSide, 3,
                                     PixelLayout::Planar);
    ++in_file_;
    return rec;
  }

 private:
  std::vector<std::size_t> counts_;
  std::size_t file_ = 0;
  std::size_t in_file_ = 0;
  std::size_t index_ = 0;
  std::ifstream stream_;
  std::vector<std::uint8_t> buffer_;
};

bool is_pnm_file(const fs::directory_entry& e) {
  if (!e.is_regular_file()) return false;
  const auto ext = e.path().extension().string();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

class ImageDirReader final : public DatasetReader {
 public:
  explicit ImageDirReader(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("'" + root.string() + "' is not a directory");
    std::vector<fs::path> classes;
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) classes.push_back(e.path());
    }
    std::sort(classes.begin(), classes.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (classes.empty()) throw FormatError(root.string() + ": no class subdirectories");

    std::optional<ImageShape> shape;
    for (std::size_t label = 0; label < classes.size(); ++label) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(classes[label])) {
        if (is_pnm_file(e)) files.push_back(e.path());
      }
      if (files.empty()) {
        throw FormatError(classes[label].string() + ": class directory holds no images");
      }
      std::sort(files.begin(), files.end());
      for (auto& f : files) {
        const PnmBytes pnm = read_pnm_bytes(f);
        const ImageShape s{pnm.width, pnm.height, pnm.channels};
        if (!shape) shape = s;
        if (s != *shape) {
          throw FormatError(f.string() + ": shape " + std::to_string(s.width) + "x" +
                            std::to_string(s.height) + "x" + std::to_string(s.channels) +
                            " differs from the dataset's");
        }
        entries_.push_back({std::move(f), static_cast<int>(label)});
      }
      manifest_.label_names.push_back(classes[label].filename().string());
    }
    manifest_.format = DatasetFormat::ImageDir;
    manifest_.image_shape = *shape;
    manifest_.num_items = entries_.size();
    manifest_.source_paths = {root};
  }

  std::optional<DatasetRecord> next() override {
    if (index_ == entries_.size()) return std::nullopt;
    const auto& e = entries_[index_];
    DatasetRecord rec;
    rec.index = index_++;
    rec.name = e.path.stem().string();
    rec.item.label = e.label;
    rec.item.image = read_pnm(e.path);
    return rec;
  }

 private:
  struct Entry {
    fs::path path;
    int label;
  };
  std::vector<Entry> entries_;
  std::size_t index_ = 0;
};

}  // namespace

DatasetFormat parse_format(const std::string& s) {
  if (s == "idx") return DatasetFormat::Idx;
  if (s == "cifar_bin" || s == "cifar") return DatasetFormat::CifarBin;
  if (s == "image_dir") return DatasetFormat::ImageDir;
  throw ParameterError("unknown dataset format '" + s + "' (idx | cifar_bin | image_dir)");
}

std::string to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Idx: return "idx";
    case DatasetFormat::CifarBin: return "cifar_bin";
    case DatasetFormat::ImageDir: return "image_dir";
  }
  return "?";
}

OutputCodec parse_codec(const std::string& s) {
  if (s == "same") return OutputCodec::Same;
  if (s == "image_dir") return OutputCodec::ImageDir;
  throw ParameterError("unknown codec '" + s + "' (same | image_dir)");
}

std::unique_ptr<DatasetReader> read_idx(const fs::path& images_path, const fs::path& labels_path) {
  return std::make_unique<IdxReader>(images_path, labels_path);
}

std::unique_ptr<DatasetReader> read_cifar_bin(const std::vector<fs::path>& paths) {
  return std::make_unique<CifarReader>(paths);
}

std::unique_ptr<DatasetReader> read_image_dir(const fs::path& root) {
  return std::make_unique<ImageDirReader>(root);
}

std::unique_ptr<DatasetReader> open_dataset(DatasetFormat format,
                                            const std::vector<fs::path>& sources) {
  switch (format) {
    case DatasetFormat::Idx:
      if (sources.size() != 2) {
        throw ParameterError("idx datasets take exactly two sources: images file, labels file");
      }
      return read_idx(sources[0], sources[1]);
    case DatasetFormat::CifarBin:
      return read_cifar_bin(sources);
    case DatasetFormat::ImageDir:
      if (sources.size() != 1) throw ParameterError("image_dir datasets take one root directory");
      return read_image_dir(sources[0]);
  }
  throw ParameterError("unknown dataset format");
}

std::unique_ptr<DatasetReader> open_manifest(const fs::path& manifest_path) {
  const auto bytes = read_file(manifest_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  if (!j.contains("format") || !j.contains("files")) {
    throw FormatError(manifest_path.string() + ": manifest lacks 'format' or 'files'");
  }
  std::vector<fs::path> sources;
  for (const auto& f : j["files"]) sources.push_back(manifest_path.parent_path() / f.get<std::string>());
  return open_dataset(parse_format(j["format"].get<std::string>()), sources);
}

nlohmann::json manifest_to_json(const DatasetManifest& m, const Provenance& provenance,
                                const std::vector<std::size_t>& label_counts,
                                const fs::path& relative_to) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : m.source_paths) {
    files.push_back(relative_to.empty() ? p.string() : p.lexically_relative(relative_to).string());
  }
  return {{"format", to_string(m.format)},
          {"shape", {m.image_shape.width, m.image_shape.height, m.image_shape.channels}},
          {"count", m.num_items},
          {"classes", m.label_names},
          {"label_counts", label_counts},
          {"files", files},
          {"enhancement", {{"method", provenance.method}, {"params", provenance.params}}},
          {"tool_version", kToolVersion}};
}

struct DatasetWriter::State {
  DatasetManifest source;
  DatasetManifest out;
  fs::path root;
  OutputCodec codec;
  Provenance provenance;
  std::size_t written = 0;
  std::vector<std::size_t> label_counts;
  bool finished = false;

  // IDX
  std::ofstream idx_images;
  std::ofstream idx_labels;
  // CIFAR
  std::ofstream cifar;
  std::size_t cifar_file = static_cast<std::size_t>(-1);
  std::vector<std::uint8_t> record;

  bool writes_image_dir() const {
    return codec == OutputCodec::ImageDir || source.format == DatasetFormat::ImageDir;
  }
};

DatasetWriter::DatasetWriter(const DatasetManifest& source, fs::path out_root, OutputCodec codec,
                             Provenance provenance)
    : state_(std::make_unique<State>()) {
  auto& s = *state_;
  s.source = source;
  s.root = std::move(out_root);
  s.codec = codec;
  s.provenance = std::move(provenance);
  s.label_counts.assign(source.label_names.size(), 0);

  std::error_code ec;
  fs::create_directories(s.root, ec);
  if (ec) throw IoError("cannot create '" + s.root.string() + "': " + ec.message());

  s.out = source;
  if (s.writes_image_dir()) {
    s.out.format = DatasetFormat::ImageDir;
    s.out.source_paths = {s.root};
    return;
  }
  s.out.source_paths.clear();
  for (const auto& p : source.source_paths) s.out.source_paths.push_back(s.root / p.filename());

  if (source.format == DatasetFormat::Idx) {
    s.idx_images = open_out(s.out.source_paths.at(0));
    s.idx_labels = open_out(s.out.source_paths.at(1));
    std::array<std::uint8_t, kIdxImageHeader> ih{};
    std::array<std::uint8_t, kIdxLabelHeader> lh{};
    const auto count = static_cast<std::uint32_t>(source.num_items);
    store_be32(ih.data(), kIdxImageMagic);
    store_be32(ih.data() + 4, count);
    store_be32(ih.data() + 8, static_cast<std::uint32_t>(source.image_shape.height));
    store_be32(ih.data() + 12, static_cast<std::uint32_t>(source.image_shape.width));
    store_be32(lh.data(), kIdxLabelMagic);
    store_be32(lh.data() + 4, count);
    s.idx_images.write(reinterpret_cast<const char*>(ih.data()), ih.size());
    s.idx_labels.write(reinterpret_cast<const char*>(lh.data()), lh.size());
  }
}

DatasetWriter::~DatasetWriter() = default;

void DatasetWriter::write(const DatasetRecord& record, const ImageD& image) {
  auto& s = *state_;
  require(!s.finished, "DatasetWriter: write after finish");
  const ImageShape shape{image.width(), image.height(), image.channels()};
  if (shape != s.source.image_shape) {
    throw FormatError("record " + std::to_string(record.index) + ": enhanced image shape differs "
                      "from the dataset shape");
  }
  const int label = record.item.label;
  if (label < 0 || static_cast<std::size_t>(label) >= s.label_counts.size()) {
    throw FormatError("record " + std::to_string(record.index) + ": label out of range");
  }

  if (s.writes_image_dir()) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "%06zu", record.index);
    const std::string base = record.name.empty() ? std::string(stem) : record.name;
    // Class directories appear on first use; image_dir readers reject empty classes.
    const fs::path class_dir = s.root / s.source.label_names[static_cast<std::size_t>(label)];
    if (s.label_counts[static_cast<std::size_t>(label)] == 0) {
      std::error_code ec;
      fs::create_directories(class_dir, ec);
      if (ec) throw IoError("cannot create '" + class_dir.string() + "': " + ec.message());
    }
    write_pnm(class_dir / (base + (shape.channels == 1 ? ".pgm" : ".ppm")), image);
  } else if (s.source.format == DatasetFormat::Idx) {
    const auto pixels = to_u8(image);
    const auto byte = static_cast<char>(label);
    s.idx_labels.write(&byte, 1);
    s.idx_images.write(reinterpret_cast<const char*>(pixels.data()),
                       static_cast<std::streamsize>(pixels.size()));
    if (!s.idx_images || !s.idx_labels) throw IoError("IDX write failed");
  } else {
    if (record.source_file != s.cifar_file) {
      if (s.cifar.is_open()) s.cifar.close();
      s.cifar_file = record.source_file;
      s.cifar = open_out(s.out.source_paths.at(record.source_file));
    }
    s.record.assign(1, static_cast<std::uint8_t>(label));
    const auto pixels = to_u8(image, PixelLayout::Planar);
    s.record.insert(s.record.end(), pixels.begin(), pixels.end());
    s.cifar.write(reinterpret_cast<const char*>(s.record.data()),
                  static_cast<std::streamsize>(s.record.size()));
    if (!s.cifar) throw IoError("CIFAR write failed");
  }
  ++s.label_counts[static_cast<std::size_t>(label)];
  ++s.written;
}

DatasetManifest DatasetWriter::finish() {
  auto& s = *state_;
  require(!s.finished, "DatasetWriter: finish called twice");
  s.finished = true;
  if (s.written != s.source.num_items) {
    throw FormatError("wrote " + std::to_string(s.written) + " records, dataset declares " +
                      std::to_string(s.source.num_items));
  }
  s.idx_images.close();
  s.idx_labels.close();
  s.cifar.close();
  s.out.num_items = s.written;

  const std::string text = manifest_to_json(s.out, s.provenance, s.label_counts, s.root).dump(2) + "\n";
  write_file(s.root / kManifestFileName,
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return s.out;
}

std::size_t DatasetWriter::written() const { return state_->written; }

const std::vector<std::size_t>& DatasetWriter::label_counts() const { return state_->label_counts; }

}  // namespace wavedge
