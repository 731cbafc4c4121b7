#include "regions/paths.hpp"

#include <cmath>
#include <numbers>

#include "regions/error.hpp"
#include "regions/log.hpp"
#include "random.hpp"

namespace regions {

namespace {

// Mirror index into [0, n) without repeating the edge sample.
std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void require_image(const Tensor& image) {
  if (image.dims.size() != 3 || image.numel() == 0) {
    throw InputError("expected a non-empty C x H x W image");
  }
}

bool anchors_distinct(const std::vector<Tensor>& anchors, bool closed) {
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    if (bit_equal(anchors[a].values, anchors[a + 1].values)) return false;
  }
  if (closed && anchors.size() > 1 &&
      bit_equal(anchors.back().values, anchors.front().values)) {
    return false;
  }
  return true;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> PathSpec::segments() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t A = anchors.size();
  if (A < 2) return out;
  const std::size_t count = closed ? A : A - 1;
  for (std::size_t a = 0; a < count; ++a) out.emplace_back(a, (a + 1) % A);
  return out;
}

std::size_t CircularPathOptions::effective_pad() const {
  return pad ? *pad : static_cast<std::size_t>(std::ceil(radius));
}

std::pair<double, double> circular_shift(double radius, std::size_t anchors, std::size_t a) {
  if (anchors == 0) throw InputError("anchor count must be positive");
  const double alpha = static_cast<double>(a) * 2.0 * std::numbers::pi / static_cast<double>(anchors);
  return {radius * std::cos(alpha), radius * std::sin(alpha)};
}

Tensor translate_image(const Tensor& image, double dx, double dy, std::size_t pad) {
  require_image(image);
  if (!std::isfinite(dx) || !std::isfinite(dy)) throw InputError("shift must be finite");
  const double limit = static_cast<double>(pad);
  if (std::abs(dx) > limit || std::abs(dy) > limit) {
    throw InputError("shift (" + std::to_string(dx) + ", " + std::to_string(dy) +
                     ") exceeds pad " + std::to_string(pad));
  }
  const auto C = static_cast<std::size_t>(image.dims[0]);
  const auto H = static_cast<std::ptrdiff_t>(image.dims[1]);
  const auto W = static_cast<std::ptrdiff_t>(image.dims[2]);

  // Output pixel (y, x) samples the source at (y - dy, x - dx). The pad only
  // bounds the shift; reflection is evaluated on the fly.
  const double fy_floor = std::floor(-dy);
  const double fx_floor = std::floor(-dx);
  const double fy = -dy - fy_floor;
  const double fx = -dx - fx_floor;
  const auto oy = static_cast<std::ptrdiff_t>(fy_floor);
  const auto ox = static_cast<std::ptrdiff_t>(fx_floor);

  Tensor out(image.dims);
  for (std::size_t c = 0; c < C; ++c) {
    const double* src = image.values.data() + c * static_cast<std::size_t>(H * W);
    double* dst = out.values.data() + c * static_cast<std::size_t>(H * W);
    auto at = [&](std::ptrdiff_t y, std::ptrdiff_t x) {
      return src[reflect(y, H) * W + reflect(x, W)];
    };
    for (std::ptrdiff_t y = 0; y < H; ++y) {
      for (std::ptrdiff_t x = 0; x < W; ++x) {
        const std::ptrdiff_t sy = y + oy;
        const std::ptrdiff_t sx = x + ox;
        // Zero-weight taps are skipped so that integer shifts copy exactly.
        auto row = [&](std::ptrdiff_t yy) {
          const double left = at(yy, sx);
          return fx == 0.0 ? left : (1.0 - fx) * left + fx * at(yy, sx + 1);
        };
        const double top = row(sy);
        dst[y * W + x] = fy == 0.0 ? top : (1.0 - fy) * top + fy * row(sy + 1);
      }
    }
  }
  return out;
}

Tensor normalize_image(const Tensor& image, const Normalization& norm) {
  require_image(image);
  const auto C = static_cast<std::size_t>(image.dims[0]);
  if (norm.mean.size() != C || norm.std.size() != C) {
    throw InputError("normalization needs one mean and std per channel");
  }
  const std::size_t plane = image.numel() / C;
  Tensor out = image;
  for (std::size_t c = 0; c < C; ++c) {
    if (!(norm.std[c] > 0.0)) throw InputError("normalization std must be positive");
    for (std::size_t i = 0; i < plane; ++i) {
      double& v = out.values[c * plane + i];
      v = (v - norm.mean[c]) / norm.std[c];
    }
  }
  return out;
}

std::vector<PathSpec> build_circular_paths(std::span<const Tensor> images,
                                           const CircularPathOptions& options) {
  if (images.empty()) throw InputError("no images to build paths from");
  if (options.anchors < 2) throw InputError("a closed path needs at least 2 anchors");
  if (!(options.radius >= 0.0)) throw InputError("radius must be non-negative");
  const std::size_t pad = options.effective_pad();

  std::vector<PathSpec> paths;
  paths.reserve(images.size());
  for (std::size_t n = 0; n < images.size(); ++n) {
    PathSpec path;
    path.path_id = n;
    path.radius = options.radius;
    path.closed = true;
    path.anchors.reserve(options.anchors);
    for (std::size_t a = 0; a < options.anchors; ++a) {
      const auto [dx, dy] = circular_shift(options.radius, options.anchors, a);
      Tensor anchor = translate_image(images[n], dx, dy, pad);
      if (options.normalization) anchor = normalize_image(anchor, *options.normalization);
      path.anchors.push_back(std::move(anchor));
    }
    if (!anchors_distinct(path.anchors, true)) {
      logger().warn("path {}: consecutive anchors coincide, dropping degenerate path", n);
      continue;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<PathSpec> build_noise_paths(const Tensor& mean, const Tensor& stddev,
                                        std::size_t count, std::uint64_t seed,
                                        const CircularPathOptions& options) {
  require_image(mean);
  if (stddev.dims != mean.dims) throw InputError("mean and std tensors differ in shape");
  for (double s : stddev.values) {
    if (!(s >= 0.0)) throw InputError("per-pixel std must be non-negative");
  }
  std::mt19937_64 rng(seed);
  const double half_width = std::sqrt(3.0);
  std::vector<Tensor> images;
  images.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Tensor img(mean.dims);
    for (std::size_t i = 0; i < img.values.size(); ++i) {
      const double u = 2.0 * detail::unit_uniform(rng) - 1.0;
      img.values[i] = mean.values[i] + half_width * stddev.values[i] * u;
    }
    images.push_back(std::move(img));
  }
  if (images.empty()) return {};
  return build_circular_paths(images, options);
}

std::vector<PathSpec> build_open_paths(std::span<const Tensor> images, std::size_t shift_px,
                                       std::size_t anchors) {
  if (shift_px < 1) throw InputError("open paths need shift_px >= 1");
  if (anchors < 2) throw InputError("an open path needs at least 2 anchors");
  const std::size_t pad = (anchors - 1) * shift_px;
  std::vector<PathSpec> paths;
  for (std::size_t n = 0; n < images.size(); ++n) {
    PathSpec path;
    path.path_id = n;
    path.radius = static_cast<double>(shift_px);
    path.closed = false;
    for (std::size_t k = 0; k < anchors; ++k) {
      path.anchors.push_back(
          translate_image(images[n], static_cast<double>(k * shift_px), 0.0, pad));
    }
    if (!anchors_distinct(path.anchors, false)) {
      logger().warn("path {}: consecutive anchors coincide, dropping degenerate path", n);
      continue;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<PathSpec> build_point_loops(std::span<const std::vector<double>> points,
                                        double radius, std::size_t anchors) {
  if (anchors < 2) throw InputError("a closed path needs at least 2 anchors");
  if (!(radius > 0.0)) throw InputError("loop radius must be positive");
  std::vector<PathSpec> paths;
  paths.reserve(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    if (points[n].size() < 2) throw InputError("point loops need at least 2 input dimensions");
    PathSpec path;
    path.path_id = n;
    path.radius = radius;
    path.closed = true;
    for (std::size_t a = 0; a < anchors; ++a) {
      const auto [dx, dy] = circular_shift(radius, anchors, a);
      std::vector<double> p = points[n];
      p[0] += dx;
      p[1] += dy;
      const std::vector<std::uint64_t> dims{p.size()};
      path.anchors.emplace_back(dims, std::move(p));
    }
    if (!anchors_distinct(path.anchors, true)) {
      logger().warn("path {}: consecutive anchors coincide, dropping degenerate path", n);
      continue;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<SegmentTask> segment_tasks(std::span<const PathSpec> paths, double tau) {
  std::vector<SegmentTask> tasks;
  std::size_t id = 0;
  for (const auto& path : paths) {
    for (const auto& [a, b] : path.segments()) {
      tasks.push_back(SegmentTask::make(path.anchors[a].values, path.anchors[b].values, tau, id++,
                                        path.path_id));
    }
  }
  return tasks;
}

}  // namespace regions
