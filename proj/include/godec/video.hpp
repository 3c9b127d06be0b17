#pragma once

#include <cstddef>
#include <vector>

#include "godec/godec.hpp"
#include "godec/matrix.hpp"

namespace godec {

// Static horizontal-gradient background with a bright square moving across it.
// Pixel values are multiples of 1/255 so the video survives a PGM round trip.
struct SyntheticVideo {
  std::size_t width = 0;
  std::size_t height = 0;
  DenseMatrix frames;                     // frames × (width·height), frame t is row t
  DenseMatrix background;                 // 1 × (width·height)
  std::vector<std::vector<bool>> masks;   // true where the square covers the pixel
};

SyntheticVideo make_moving_square_video(std::size_t width = 32, std::size_t height = 24, std::size_t frames = 20,
                                        std::size_t square = 4);

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b);

// Foreground mask of each frame: |S(t, :)| > threshold.
std::vector<std::vector<bool>> foreground_masks(const DenseMatrix& s, double threshold = 0.1);

struct VideoDemoResult {
  DecompResult decomposition;
  std::vector<double> jaccard;  // per frame
  double min_jaccard = 0.0;
  double mean_jaccard = 0.0;
};

// Rank-1 GoDec (BRP engine) with card = total foreground pixel count, scored
// against the generator's masks.
VideoDemoResult run_video_demo(const SyntheticVideo& video, const DenseMatrix& x, const RngSeed& seed);

}  // namespace godec
