#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "regions/discovery.hpp"
#include "regions/tensor.hpp"

namespace regions {

inline constexpr double kDefaultRadius = 4.0;
inline constexpr std::size_t kDefaultAnchors = 8;
inline constexpr std::size_t kDefaultPathCount = 1024;

/// A chain of anchors joined by straight segments, closed or open.
struct PathSpec {
  std::size_t path_id = 0;
  std::vector<Tensor> anchors;
  double radius = 0.0;
  bool closed = true;
  std::optional<int> base_label;

  std::size_t anchor_count() const { return anchors.size(); }
  /// Anchor index pairs: (a, a+1 mod A) when closed, (a, a+1) otherwise.
  std::vector<std::pair<std::size_t, std::size_t>> segments() const;
};

/// Per-channel (x - mean) / std.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> std;
};

struct CircularPathOptions {
  double radius = kDefaultRadius;
  std::size_t anchors = kDefaultAnchors;
  /// Defaults to ceil(radius), the smallest pad that absorbs every shift.
  std::optional<std::size_t> pad;
  /// Applied after translation.
  std::optional<Normalization> normalization;

  std::size_t effective_pad() const;
};

/// Shift of anchor `a` on a circle: (r cos(a 2pi/A), r sin(a 2pi/A)) as (dx, dy).
std::pair<double, double> circular_shift(double radius, std::size_t anchors, std::size_t a);

/// Sub-pixel translation of a C x H x W image: reflection padding, bilinear
/// sampling, crop back to H x W. Content moves by +dx columns and +dy rows.
/// Throws InputError if a shift exceeds the pad.
Tensor translate_image(const Tensor& image, double dx, double dy, std::size_t pad);

Tensor normalize_image(const Tensor& image, const Normalization& norm);

/// One closed loop per image; anchor a is the image translated by
/// circular_shift(r, A, a). Images whose consecutive anchors coincide are
/// dropped with a warning.
std::vector<PathSpec> build_circular_paths(std::span<const Tensor> images,
                                           const CircularPathOptions& options = {});

/// Closed loops around seeded uniform-noise images whose per-pixel mean and
/// standard deviation match `mean` and `stddev` (both C x H x W).
std::vector<PathSpec> build_noise_paths(const Tensor& mean, const Tensor& stddev,
                                        std::size_t count, std::uint64_t seed,
                                        const CircularPathOptions& options = {});

/// Open chains of `anchors` images, anchor k shifted by k * shift_px columns.
std::vector<PathSpec> build_open_paths(std::span<const Tensor> images, std::size_t shift_px,
                                       std::size_t anchors = 2);

/// Closed loops around points of a flat input space: anchor a is the point
/// displaced by circular_shift(r, A, a) in its first two coordinates.
std::vector<PathSpec> build_point_loops(std::span<const std::vector<double>> points,
                                        double radius, std::size_t anchors = kDefaultAnchors);

/// Flattens paths into segment tasks with consecutive segment ids.
std::vector<SegmentTask> segment_tasks(std::span<const PathSpec> paths, double tau = kDefaultTau);

}  // namespace regions
