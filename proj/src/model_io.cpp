#include "regions/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "json.hpp"
#include "regions/error.hpp"

namespace regions {

using nlohmann::json;

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

template <class T>
void put_le(std::vector<unsigned char>& buf, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<unsigned char>((value >> (8 * i)) & 0xff));
  }
}

template <class T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

void put_f64(std::vector<unsigned char>& buf, double v) {
  put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(v));
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

[[noreturn]] void manifest_error(std::size_t layer, const std::string& msg) {
  throw FormatError("manifest layer " + std::to_string(layer) + ": " + msg);
}

template <class T>
T field(const json& j, const char* key, std::size_t layer) {
  if (!j.contains(key)) manifest_error(layer, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    manifest_error(layer, std::string("field '") + key + "' has the wrong type");
  }
}

struct Slice {
  std::uint64_t offset;
  std::uint64_t length;
  std::size_t layer;
};

class BlobReader {
 public:
  explicit BlobReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  std::vector<double> take(const json& desc, std::size_t count, std::size_t layer,
                           const char* what) {
    if (!desc.is_object()) manifest_error(layer, std::string(what) + " slice missing");
    const auto offset = field<std::uint64_t>(desc, "offset", layer);
    const auto length = field<std::uint64_t>(desc, "length", layer);
    if (offset % 8 != 0 || length % 8 != 0) {
      manifest_error(layer, std::string(what) + " slice is not 8-byte aligned");
    }
    if (length != 8 * count) {
      manifest_error(layer, std::string(what) + " declares " + std::to_string(length / 8) +
                                " values, layer shape implies " + std::to_string(count));
    }
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      manifest_error(layer, std::string(what) + " slice [" + std::to_string(offset) + ", " +
                                std::to_string(offset + length) + ") exceeds blob of " +
                                std::to_string(bytes_.size()) + " bytes");
    }
    slices_.push_back({offset, length, layer});
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = get_f64(bytes_.data() + offset + 8 * i);
      if (!std::isfinite(values[i])) {
        manifest_error(layer, std::string("non-finite value in ") + what);
      }
    }
    return values;
  }

  void check_overlaps() {
    std::sort(slices_.begin(), slices_.end(),
              [](const Slice& a, const Slice& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < slices_.size(); ++i) {
      if (slices_[i - 1].offset + slices_[i - 1].length > slices_[i].offset) {
        manifest_error(slices_[i].layer, "parameter slice overlaps layer " +
                                             std::to_string(slices_[i - 1].layer));
      }
    }
  }

 private:
  std::vector<unsigned char> bytes_;
  std::vector<Slice> slices_;
};

Conv2d read_conv(const json& j, BlobReader& blob, std::size_t layer) {
  Conv2d c;
  c.in_channels = field<std::size_t>(j, "in_channels", layer);
  c.out_channels = field<std::size_t>(j, "out_channels", layer);
  const auto kernel = field<std::vector<std::size_t>>(j, "kernel", layer);
  if (kernel.size() != 2) manifest_error(layer, "kernel must be [height, width]");
  c.kernel_h = kernel[0];
  c.kernel_w = kernel[1];
  c.stride = j.value("stride", std::size_t{1});
  c.padding = j.value("padding", std::size_t{0});
  c.weight = blob.take(j.value("weight", json()),
                       c.out_channels * c.in_channels * c.kernel_h * c.kernel_w, layer, "weight");
  c.bias = blob.take(j.value("bias", json()), c.out_channels, layer, "bias");
  return c;
}

class BlobWriter {
 public:
  json put(const std::vector<double>& values) {
    json slice = {{"offset", bytes_.size()}, {"length", 8 * values.size()}};
    for (double v : values) put_f64(bytes_, v);
    return slice;
  }
  const std::vector<unsigned char>& bytes() const { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

json write_conv(const Conv2d& c, BlobWriter& blob) {
  return {{"in_channels", c.in_channels},
          {"out_channels", c.out_channels},
          {"kernel", {c.kernel_h, c.kernel_w}},
          {"stride", c.stride},
          {"padding", c.padding},
          {"weight", blob.put(c.weight)},
          {"bias", blob.put(c.bias)}};
}

}  // namespace

Network load_model(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& blob_path) {
  json manifest;
  {
    std::ifstream in(manifest_path);
    if (!in) throw FormatError("cannot open " + manifest_path.string());
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw FormatError("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
    }
  }
  if (!manifest.is_object()) throw FormatError("manifest root must be an object");
  const int version = manifest.value("format_version", -1);
  if (version != kManifestVersion) {
    throw FormatError("unsupported manifest format_version " + std::to_string(version) +
                      " (expected " + std::to_string(kManifestVersion) + ")");
  }

  std::vector<std::size_t> dims;
  try {
    dims = manifest.at("input_shape").get<std::vector<std::size_t>>();
  } catch (const json::exception&) {
    throw FormatError("manifest input_shape missing or malformed");
  }
  Shape input;
  if (dims.size() == 1) {
    input = Shape::flat(dims[0]);
  } else if (dims.size() == 3) {
    input = {dims[0], dims[1], dims[2]};
  } else {
    throw FormatError("input_shape must be [d] or [channels, height, width]");
  }

  const json& layer_list = manifest.value("layers", json::array());
  if (!layer_list.is_array() || layer_list.empty()) {
    throw FormatError("manifest declares no layers");
  }

  BlobReader blob(read_bytes(blob_path));
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < layer_list.size(); ++i) {
    const json& j = layer_list[i];
    const auto kind = field<std::string>(j, "kind", i);
    if (kind == "dense") {
      Dense d;
      d.in_features = field<std::size_t>(j, "in_features", i);
      d.out_features = field<std::size_t>(j, "out_features", i);
      d.weight = blob.take(j.value("weight", json()), d.in_features * d.out_features, i, "weight");
      d.bias = blob.take(j.value("bias", json()), d.out_features, i, "bias");
      layers.emplace_back(std::move(d));
    } else if (kind == "conv2d") {
      layers.emplace_back(read_conv(j, blob, i));
    } else if (kind == "avgpool2d") {
      AvgPool2d p;
      p.kernel = field<std::size_t>(j, "kernel", i);
      p.stride = j.value("stride", p.kernel);
      layers.emplace_back(p);
    } else if (kind == "flatten") {
      layers.emplace_back(Flatten{});
    } else if (kind == "relu") {
      layers.emplace_back(Relu{});
    } else if (kind == "save") {
      layers.emplace_back(Save{field<std::string>(j, "tag", i)});
    } else if (kind == "add") {
      Add a{field<std::string>(j, "tag", i), std::nullopt};
      if (j.contains("projection") && !j.at("projection").is_null()) {
        a.projection = read_conv(j.at("projection"), blob, i);
      }
      layers.emplace_back(std::move(a));
    } else {
      manifest_error(i, "unsupported layer kind '" + kind + "'");
    }
  }
  blob.check_overlaps();

  try {
    Network net(input, std::move(layers));
    if (manifest.contains("output_dim") &&
        manifest.at("output_dim").get<std::size_t>() != net.output_dim()) {
      throw FormatError("manifest output_dim " + manifest.at("output_dim").dump() +
                        " does not match network output " + std::to_string(net.output_dim()));
    }
    return net;
  } catch (const InputError& e) {
    throw FormatError(std::string("invalid network: ") + e.what());
  }
}

void save_model(const Network& net, const std::filesystem::path& manifest_path,
                const std::filesystem::path& blob_path) {
  if (net.layers().empty()) throw InputError("refusing to save a network without layers");
  BlobWriter blob;
  json layers = json::array();
  for (const Layer& layer : net.layers()) {
    json j = {{"kind", std::string(kind_name(layer))}};
    if (const auto* d = std::get_if<Dense>(&layer)) {
      j["in_features"] = d->in_features;
      j["out_features"] = d->out_features;
      j["weight"] = blob.put(d->weight);
      j["bias"] = blob.put(d->bias);
    } else if (const auto* c = std::get_if<Conv2d>(&layer)) {
      j.update(write_conv(*c, blob));
    } else if (const auto* p = std::get_if<AvgPool2d>(&layer)) {
      j["kernel"] = p->kernel;
      j["stride"] = p->stride;
    } else if (const auto* s = std::get_if<Save>(&layer)) {
      j["tag"] = s->tag;
    } else if (const auto* a = std::get_if<Add>(&layer)) {
      j["tag"] = a->tag;
      if (a->projection) j["projection"] = write_conv(*a->projection, blob);
    }
    layers.push_back(std::move(j));
  }
  const Shape in = net.input_shape();
  json manifest = {{"format_version", kManifestVersion},
                   {"input_shape", {in.channels, in.height, in.width}},
                   {"output_dim", net.output_dim()},
                   {"layers", std::move(layers)}};

  write_bytes(blob_path, blob.bytes());
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + manifest_path.string() + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw FormatError("write failed for " + manifest_path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string where = path.string();
  if (bytes.size() < 10) throw FormatError(where + ": truncated RTEN header");
  if (std::memcmp(bytes.data(), "RTEN", 4) != 0) throw FormatError(where + ": bad magic");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kTensorVersion) {
    throw FormatError(where + ": unsupported RTEN version " + std::to_string(version));
  }
  const unsigned dtype = bytes[8];
  if (dtype != 0) throw FormatError(where + ": unsupported dtype code " + std::to_string(dtype));
  const std::size_t ndim = bytes[9];
  std::size_t pos = 10;
  if (bytes.size() < pos + 8 * ndim) throw FormatError(where + ": truncated dims");
  std::vector<std::uint64_t> dims(ndim);
  for (auto& d : dims) {
    d = get_le<std::uint64_t>(bytes.data() + pos);
    pos += 8;
  }
  const std::size_t n = element_count(dims);
  if (bytes.size() - pos != 8 * n) {
    throw FormatError(where + ": payload has " + std::to_string(bytes.size() - pos) +
                      " bytes, dims imply " + std::to_string(8 * n));
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = get_f64(bytes.data() + pos + 8 * i);
    if (!std::isfinite(values[i])) throw FormatError(where + ": non-finite value");
  }
  return Tensor(std::move(dims), std::move(values));
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  if (tensor.dims.size() > 255) throw InputError("tensor rank exceeds 255");
  if (tensor.values.size() != tensor.numel()) throw InputError("tensor payload/dims mismatch");
  std::vector<unsigned char> buf{'R', 'T', 'E', 'N'};
  buf.reserve(10 + 8 * tensor.dims.size() + 8 * tensor.values.size());
  put_le<std::uint32_t>(buf, kTensorVersion);
  buf.push_back(0);
  buf.push_back(static_cast<unsigned char>(tensor.dims.size()));
  for (auto d : tensor.dims) put_le<std::uint64_t>(buf, d);
  for (double v : tensor.values) put_f64(buf, v);
  write_bytes(path, buf);
}

}  // namespace regions
