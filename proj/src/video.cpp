#include "godec/video.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "godec/error.hpp"

namespace godec {

namespace {

double quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

}  // namespace

SyntheticVideo make_moving_square_video(std::size_t width, std::size_t height, std::size_t frames,
                                        std::size_t square) {
  if (frames < 2 || square < 1 || width < square + 2 || height < square + 2) {
    throw ParameterError("make_moving_square_video: frame too small for the square");
  }
  SyntheticVideo v;
  v.width = width;
  v.height = height;
  const std::size_t pixels = width * height;
  v.background = DenseMatrix(1, pixels);
  for (std::size_t i = 0; i < height; ++i)
    for (std::size_t j = 0; j < width; ++j)
      v.background(0, j + i * width) = quantize(0.1 + 0.5 * static_cast<double>(j) / static_cast<double>(width - 1));

  v.frames = DenseMatrix(frames, pixels);
  v.masks.assign(frames, std::vector<bool>(pixels, false));
  const double span_c = static_cast<double>(width - square - 2);
  const double span_r = static_cast<double>(height - square - 2);
  for (std::size_t t = 0; t < frames; ++t) {
    const double f = static_cast<double>(t) / static_cast<double>(frames - 1);
    const auto c0 = 1 + static_cast<std::size_t>(std::lround(f * span_c));
    const auto r0 = 1 + static_cast<std::size_t>(std::lround(f * span_r));
    std::ranges::copy(v.background.row(0), v.frames.row(t).begin());
    for (std::size_t i = r0; i < r0 + square; ++i) {
      for (std::size_t j = c0; j < c0 + square; ++j) {
        v.frames(t, j + i * width) = 1.0;
        v.masks[t][j + i * width] = true;
      }
    }
  }
  return v;
}

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw DimensionError("jaccard: mask sizes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::vector<bool>> foreground_masks(const DenseMatrix& s, double threshold) {
  std::vector<std::vector<bool>> masks(s.rows(), std::vector<bool>(s.cols(), false));
  for (std::size_t t = 0; t < s.rows(); ++t)
    for (std::size_t j = 0; j < s.cols(); ++j) masks[t][j] = std::abs(s(t, j)) > threshold;
  return masks;
}

VideoDemoResult run_video_demo(const SyntheticVideo& video, const DenseMatrix& x, const RngSeed& seed) {
  if (x.rows() != video.masks.size() || x.cols() != video.width * video.height) {
    throw DimensionError("run_video_demo: matrix does not match the video");
  }
  std::size_t card = 0;
  for (const auto& m : video.masks) card += static_cast<std::size_t>(std::count(m.begin(), m.end(), true));

  GodecConfig cfg;
  cfg.rank = 1;
  cfg.card = card;
  cfg.power = 2;
  cfg.epsilon = 1e-9;
  cfg.max_iters = 100;
  cfg.seed = seed;
  cfg.engine = GodecEngine::brp;

  VideoDemoResult out;
  out.decomposition = godec_brp(x, cfg);
  const auto masks = foreground_masks(out.decomposition.s);
  for (std::size_t t = 0; t < masks.size(); ++t) out.jaccard.push_back(jaccard(masks[t], video.masks[t]));
  out.min_jaccard = *std::min_element(out.jaccard.begin(), out.jaccard.end());
  out.mean_jaccard = std::accumulate(out.jaccard.begin(), out.jaccard.end(), 0.0) /
                     static_cast<double>(out.jaccard.size());
  return out;
}

}  // namespace godec
