#include "geoshadow/masks.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "geoshadow/error.hpp"

namespace geoshadow {

namespace {

class DisjointSet {
 public:
  std::size_t make() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
};

constexpr std::size_t kNoLabel = std::numeric_limits<std::size_t>::max();

// Two-pass connected-component labeling of pixels where `member` holds.
// Returns per-pixel root labels (kNoLabel for non-members).
template <class Member>
std::vector<std::size_t> label_components(int w, int h, bool eight_connected, Member&& member) {
  std::vector<std::size_t> labels(static_cast<std::size_t>(w) * h, kNoLabel);
  DisjointSet sets;
  const auto at = [&](int c, int r) { return static_cast<std::size_t>(r) * w + c; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!member(at(c, r))) continue;
      std::size_t label = kNoLabel;
      const auto join = [&](int nc, int nr) {
        if (nc < 0 || nc >= w || nr < 0) return;
        const std::size_t other = labels[at(nc, nr)];
        if (other == kNoLabel) return;
        if (label == kNoLabel) label = other;
        else sets.unite(label, other);
      };
      join(c - 1, r);
      join(c, r - 1);
      if (eight_connected) {
        join(c - 1, r - 1);
        join(c + 1, r - 1);
      }
      labels[at(c, r)] = label == kNoLabel ? sets.make() : label;
    }
  }
  for (std::size_t& label : labels) {
    if (label != kNoLabel) label = sets.find(label);
  }
  return labels;
}

void require_binary(const Raster& mask, const char* what) {
  for (double v : mask.samples()) {
    if (v != 0.0 && v != 1.0 && !mask.is_nodata(v)) {
      throw ArgumentError(std::string(what) + " must be binary {0, 1}, found " + std::to_string(v));
    }
  }
}

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ArgumentError(std::string(what) + ": raster shapes differ (" + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                        std::to_string(b.height()) + ")");
  }
}

}  // namespace

Raster remove_small_regions(const Raster& mask, int min_area_px) {
  require_binary(mask, "shadow mask");
  if (min_area_px <= 1) return mask;
  const auto samples = mask.samples();
  const auto labels =
      label_components(mask.width(), mask.height(), true, [&](std::size_t i) { return samples[i] == 1.0; });
  std::vector<std::size_t> area(labels.size(), 0);
  for (std::size_t label : labels) {
    if (label != kNoLabel) ++area[label];
  }
  std::vector<double> out(samples.begin(), samples.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (labels[i] != kNoLabel && area[labels[i]] < static_cast<std::size_t>(min_area_px)) out[i] = 0.0;
  }
  return mask.with_samples(std::move(out), mask.nodata());
}

Raster fill_small_holes(const Raster& mask, int max_hole_px) {
  require_binary(mask, "shadow mask");
  if (max_hole_px <= 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  const auto samples = mask.samples();
  const auto labels = label_components(w, h, false, [&](std::size_t i) { return samples[i] == 0.0; });
  std::vector<std::size_t> area(labels.size(), 0);
  std::vector<bool> touches_border(labels.size(), false);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t label = labels[static_cast<std::size_t>(r) * w + c];
      if (label == kNoLabel) continue;
      ++area[label];
      if (r == 0 || c == 0 || r == h - 1 || c == w - 1) touches_border[label] = true;
    }
  }
  std::vector<double> out(samples.begin(), samples.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t label = labels[i];
    if (label != kNoLabel && !touches_border[label] && area[label] < static_cast<std::size_t>(max_hole_px)) {
      out[i] = 1.0;
    }
  }
  return mask.with_samples(std::move(out), mask.nodata());
}

Raster dilate(const Raster& mask, int radius_px) {
  if (radius_px < 0) throw ArgumentError("dilation radius must be >= 0");
  require_binary(mask, "mask");
  if (radius_px == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> out(mask.size(), 0.0);
  const long r2 = static_cast<long>(radius_px) * radius_px;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (mask(c, r) != 1.0) continue;
      for (int dr = -radius_px; dr <= radius_px; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -radius_px; dc <= radius_px; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w || static_cast<long>(dr) * dr + static_cast<long>(dc) * dc > r2) continue;
          out[static_cast<std::size_t>(rr) * w + cc] = 1.0;
        }
      }
    }
  }
  return mask.with_samples(std::move(out));
}

Raster ndvi(const Raster& nir, const Raster& red) {
  require_same_shape(nir, red, "ndvi");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(nir.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = nir.samples()[i];
    const double r = red.samples()[i];
    const double sum = n + r;
    out[i] = (nir.is_nodata(n) || red.is_nodata(r) || sum == 0.0) ? nan : (n - r) / sum;
  }
  return nir.with_samples(std::move(out), nan);
}

ValidatedMask vegetation_mask(const Raster& ndvi_raster, double threshold) {
  std::vector<double> mask(ndvi_raster.size(), 0.0);
  std::vector<double> valid(ndvi_raster.size(), 1.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double v = ndvi_raster.samples()[i];
    if (ndvi_raster.is_nodata(v) || std::isnan(v)) {
      valid[i] = 0.0;
    } else if (v > threshold) {
      mask[i] = 1.0;
    }
  }
  return {ndvi_raster.with_samples(std::move(mask)), ndvi_raster.with_samples(std::move(valid))};
}

SupervisionBundle agreement_masks(const Raster& shadow_min, const Raster& shadow_max, const Raster& uncertainty_min,
                                  const Raster& uncertainty_max) {
  require_same_shape(shadow_min, shadow_max, "agreement_masks");
  require_same_shape(shadow_min, uncertainty_min, "agreement_masks");
  require_same_shape(shadow_min, uncertainty_max, "agreement_masks");
  require_binary(shadow_min, "shadow_min");
  require_binary(shadow_max, "shadow_max");
  require_binary(uncertainty_min, "uncertainty_min");
  require_binary(uncertainty_max, "uncertainty_max");

  const std::size_t n = shadow_min.size();
  std::vector<double> supervision(n), label(n), ignore(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool lo = shadow_min.samples()[i] == 1.0;
    const bool hi = shadow_max.samples()[i] == 1.0;
    const bool uncertain = uncertainty_min.samples()[i] == 1.0 || uncertainty_max.samples()[i] == 1.0;
    const bool ignored = (lo != hi) || uncertain;
    ignore[i] = ignored ? 1.0 : 0.0;
    supervision[i] = ignored ? 0.0 : 1.0;
    label[i] = (!ignored && lo) ? 1.0 : 0.0;
  }
  return {shadow_min,
          shadow_max,
          shadow_min.with_samples(std::move(supervision)),
          shadow_min.with_samples(std::move(label)),
          shadow_min.with_samples(std::move(ignore)),
          std::nullopt};
}

double shadow_loss(std::span<const double> pred, std::span<const double> gt) {
  if (gt.empty()) throw ArgumentError("shadow_loss needs at least one ray");
  if (pred.size() != gt.size()) {
    throw ArgumentError("shadow_loss: pred has " + std::to_string(pred.size()) + " rays, gt has " +
                        std::to_string(gt.size()));
  }
  double positives = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] != 0.0 && gt[i] != 1.0) throw ArgumentError("shadow_loss: gt must be binary");
    if (!(pred[i] >= 0.0 && pred[i] <= 1.0)) throw ArgumentError("shadow_loss: pred must lie in [0, 1]");
    positives += gt[i];
  }
  const double n = static_cast<double>(gt.size());
  const double lambda = positives / n;
  double sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double diff = pred[i] - gt[i];
    sum += lambda * gt[i] * diff * diff;
  }
  return sum / n;
}

}  // namespace geoshadow
