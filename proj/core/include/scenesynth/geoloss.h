// Copyright 2026 The scenesynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SCENESYNTH_GEOLOSS_H_
#define SCENESYNTH_GEOLOSS_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace scenesynth {

// Dense H x W x C tensor of doubles, row-major with interleaved channels.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> values;

  ImageTensor() = default;
  ImageTensor(int h, int w, int c, double fill = 0.0);

  size_t size() const { return values.size(); }
  double& at(int y, int x, int c = 0) {
    return values[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c = 0) const {
    return values[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  bool same_shape(const ImageTensor& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  // Throws Error(kValidation) on empty dims or non-finite values.
  void validate() const;
};

struct LossWeights {
  double gan = 2.0;
  double pmse = 5.0;
  double rec = 10.0;
  double geo = 3.0;

  void validate() const;
};

// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> v);

struct LsganLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

// d = mean((real - 1)^2) + mean(fake^2); g = mean((fake - 1)^2).
LsganLosses lsgan_losses(const ImageTensor& real_scores,
                         const ImageTensor& fake_scores);
// Variance of d = rough - generated: mean(d^2) - mean(d)^2.
double pmse_loss(const ImageTensor& rough, const ImageTensor& generated);
// Mean absolute difference over all elements of all members.
double reconstruction_loss(std::span<const ImageTensor> reconstructed,
                           std::span<const ImageTensor> target);
// Mean squared difference over the concatenated (seg, normal, depth) maps.
double geo_guided_loss(std::span<const ImageTensor> predicted,
                       std::span<const ImageTensor> gt);
double total_objective(double gan, double pmse, double rec, double geo,
                       const LossWeights& w = {});

// Analytic gradients with respect to each operand, in operand order.
std::vector<ImageTensor> lsgan_d_grad(const ImageTensor& real_scores,
                                      const ImageTensor& fake_scores);
ImageTensor lsgan_g_grad(const ImageTensor& fake_scores);
std::vector<ImageTensor> pmse_grad(const ImageTensor& rough,
                                   const ImageTensor& generated);
// Subgradient sign(x - y) / N at ties is 0.
std::vector<ImageTensor> reconstruction_grad(
    std::span<const ImageTensor> reconstructed,
    std::span<const ImageTensor> target);
std::vector<ImageTensor> geo_guided_grad(std::span<const ImageTensor> predicted,
                                         std::span<const ImageTensor> gt);

// A scalar loss over a flat operand list and its analytic gradient.
struct LossKernel {
  std::string name;
  std::function<double(std::span<const ImageTensor>)> loss;
  std::function<std::vector<ImageTensor>(std::span<const ImageTensor>)> grad;
};

// lsgan_d (real, fake), lsgan_g (fake), pmse (rough, generated),
// reconstruction and geo_guided (3 predicted followed by 3 targets).
std::vector<LossKernel> loss_kernels();
size_t kernel_arity(const std::string& name);

// Max over elements of |analytic - central difference| /
// max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const LossKernel& kernel,
                         std::vector<ImageTensor> inputs, double eps = 1e-5);

struct LossReport {
  double gan = 0.0;
  double pmse = 0.0;
  double rec = 0.0;
  double geo = 0.0;
  LossWeights weights;
  double total = 0.0;
};
nlohmann::json loss_report_to_json(const LossReport& report);

}  // namespace scenesynth

#endif  // SCENESYNTH_GEOLOSS_H_
