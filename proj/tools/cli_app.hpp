#pragma once

#include <string>
#include <vector>

#include "hsdiff/cube.hpp"
#include "hsdiff/diffusion.hpp"
#include "hsdiff/predictor.hpp"
#include "hsdiff/schedule.hpp"

namespace hsdiff::cli {

// Parses and executes one command. `args` excludes the program name.
// Returns 0 on success, 2 on usage or contract errors, 3 on numerical
// failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

// Replicate-pad at the bottom and right edges.
HsiCube pad_replicate(const HsiCube& cube, int new_height, int new_width);

// Contiguous band-window origins covering cube_bands with ~50% overlap.
std::vector<int> band_group_starts(int cube_bands, int model_bands);

// Full denoising pipeline for arbitrary cube shapes: pads spatial dims to
// the model's stride, runs the truncated sampler per band group, and
// averages overlapping bands.
HsiCube denoise_cube(const HsiCube& noisy, const NoisePredictor& model,
                     const NoiseSchedule& s, const SamplerConfig& scfg);

}  // namespace hsdiff::cli
