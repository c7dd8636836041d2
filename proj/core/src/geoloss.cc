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


#include "scenesynth/geoloss.h"

#include <algorithm>
#include <cmath>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

void require_same(const ImageTensor& a, const ImageTensor& b, const char* op) {
  a.validate();
  b.validate();
  if (!a.same_shape(b)) {
    fail(ErrorKind::kValidation, std::string(op) + ": shape mismatch");
  }
}

void require_tuples(std::span<const ImageTensor> a,
                    std::span<const ImageTensor> b, const char* op) {
  if (a.empty() || a.size() != b.size()) {
    fail(ErrorKind::kValidation, std::string(op) + ": arity mismatch");
  }
  for (size_t i = 0; i < a.size(); ++i) require_same(a[i], b[i], op);
}

double mean_of(std::vector<double>& terms) {
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

size_t tuple_size(std::span<const ImageTensor> t) {
  size_t n = 0;
  for (const ImageTensor& x : t) n += x.size();
  return n;
}

ImageTensor like(const ImageTensor& t) {
  return ImageTensor(t.height, t.width, t.channels, 0.0);
}

std::vector<ImageTensor> tuple_grad(std::span<const ImageTensor> a,
                                    std::span<const ImageTensor> b,
                                    double (*d)(double diff, double inv_n)) {
  const double inv_n = 1.0 / static_cast<double>(tuple_size(a));
  std::vector<ImageTensor> out;
  for (const ImageTensor& t : a) out.push_back(like(t));
  for (const ImageTensor& t : b) out.push_back(like(t));
  for (size_t m = 0; m < a.size(); ++m) {
    for (size_t i = 0; i < a[m].size(); ++i) {
      const double g = d(a[m].values[i] - b[m].values[i], inv_n);
      out[m].values[i] = g;
      out[a.size() + m].values[i] = -g;
    }
  }
  return out;
}

std::pair<std::span<const ImageTensor>, std::span<const ImageTensor>> halves(
    std::span<const ImageTensor> in) {
  if (in.size() % 2 != 0) fail(ErrorKind::kValidation, "odd operand count");
  const size_t h = in.size() / 2;
  return {in.subspan(0, h), in.subspan(h)};
}

}  // namespace

ImageTensor::ImageTensor(int h, int w, int c, double fill)
    : height(h), width(w), channels(c) {
  if (h < 1 || w < 1 || c < 1) {
    fail(ErrorKind::kValidation, "tensor dims must be >= 1");
  }
  values.assign(static_cast<size_t>(h) * w * c, fill);
}

void ImageTensor::validate() const {
  if (height < 1 || width < 1 || channels < 1 || values.empty()) {
    fail(ErrorKind::kValidation, "empty tensor");
  }
  if (values.size() != static_cast<size_t>(height) * width * channels) {
    fail(ErrorKind::kValidation, "tensor size does not match its dims");
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::kValidation, "non-finite tensor value");
  }
}

void LossWeights::validate() const {
  for (double v : {gan, pmse, rec, geo}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::kValidation, "loss weights must be finite and >= 0");
    }
  }
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

LsganLosses lsgan_losses(const ImageTensor& real_scores,
                         const ImageTensor& fake_scores) {
  real_scores.validate();
  fake_scores.validate();
  std::vector<double> r, f, g;
  for (double x : real_scores.values) r.push_back((x - 1.0) * (x - 1.0));
  for (double x : fake_scores.values) {
    f.push_back(x * x);
    g.push_back((x - 1.0) * (x - 1.0));
  }
  return {mean_of(r) + mean_of(f), mean_of(g)};
}

double pmse_loss(const ImageTensor& rough, const ImageTensor& generated) {
  require_same(rough, generated, "pmse_loss");
  std::vector<double> d(rough.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = rough.values[i] - generated.values[i];
  const double n = static_cast<double>(d.size());
  const double s = pairwise_sum(d);
  std::vector<double> sq(d.size());
  for (size_t i = 0; i < d.size(); ++i) sq[i] = d[i] * d[i];
  return std::max(0.0, pairwise_sum(sq) / n - (s * s) / (n * n));
}

double reconstruction_loss(std::span<const ImageTensor> reconstructed,
                           std::span<const ImageTensor> target) {
  require_tuples(reconstructed, target, "reconstruction_loss");
  std::vector<double> terms;
  for (size_t m = 0; m < target.size(); ++m) {
    for (size_t i = 0; i < target[m].size(); ++i) {
      terms.push_back(std::abs(reconstructed[m].values[i] - target[m].values[i]));
    }
  }
  return mean_of(terms);
}

double geo_guided_loss(std::span<const ImageTensor> predicted,
                       std::span<const ImageTensor> gt) {
  require_tuples(predicted, gt, "geo_guided_loss");
  std::vector<double> terms;
  for (size_t m = 0; m < gt.size(); ++m) {
    for (size_t i = 0; i < gt[m].size(); ++i) {
      const double d = predicted[m].values[i] - gt[m].values[i];
      terms.push_back(d * d);
    }
  }
  return mean_of(terms);
}

double total_objective(double gan, double pmse, double rec, double geo,
                       const LossWeights& w) {
  return w.gan * gan + w.pmse * pmse + w.rec * rec + w.geo * geo;
}

std::vector<ImageTensor> lsgan_d_grad(const ImageTensor& real_scores,
                                      const ImageTensor& fake_scores) {
  real_scores.validate();
  fake_scores.validate();
  ImageTensor gr = like(real_scores);
  ImageTensor gf = like(fake_scores);
  const double nr = static_cast<double>(real_scores.size());
  const double nf = static_cast<double>(fake_scores.size());
  for (size_t i = 0; i < gr.size(); ++i) gr.values[i] = 2.0 * (real_scores.values[i] - 1.0) / nr;
  for (size_t i = 0; i < gf.size(); ++i) gf.values[i] = 2.0 * fake_scores.values[i] / nf;
  return {gr, gf};
}

ImageTensor lsgan_g_grad(const ImageTensor& fake_scores) {
  fake_scores.validate();
  ImageTensor g = like(fake_scores);
  const double n = static_cast<double>(fake_scores.size());
  for (size_t i = 0; i < g.size(); ++i) g.values[i] = 2.0 * (fake_scores.values[i] - 1.0) / n;
  return g;
}

std::vector<ImageTensor> pmse_grad(const ImageTensor& rough,
                                   const ImageTensor& generated) {
  require_same(rough, generated, "pmse_grad");
  std::vector<double> d(rough.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = rough.values[i] - generated.values[i];
  const double n = static_cast<double>(d.size());
  const double mean = pairwise_sum(d) / n;
  ImageTensor gr = like(rough);
  ImageTensor gg = like(generated);
  for (size_t i = 0; i < d.size(); ++i) {
    const double g = 2.0 * (d[i] - mean) / n;
    gr.values[i] = g;
    gg.values[i] = -g;
  }
  return {gr, gg};
}

std::vector<ImageTensor> reconstruction_grad(
    std::span<const ImageTensor> reconstructed,
    std::span<const ImageTensor> target) {
  require_tuples(reconstructed, target, "reconstruction_grad");
  return tuple_grad(reconstructed, target, [](double diff, double inv_n) {
    return diff > 0.0 ? inv_n : (diff < 0.0 ? -inv_n : 0.0);
  });
}

std::vector<ImageTensor> geo_guided_grad(std::span<const ImageTensor> predicted,
                                         std::span<const ImageTensor> gt) {
  require_tuples(predicted, gt, "geo_guided_grad");
  return tuple_grad(predicted, gt,
                    [](double diff, double inv_n) { return 2.0 * diff * inv_n; });
}

std::vector<LossKernel> loss_kernels() {
  using Ops = std::span<const ImageTensor>;
  return {
      {"lsgan_d", [](Ops in) { return lsgan_losses(in[0], in[1]).d_loss; },
       [](Ops in) { return lsgan_d_grad(in[0], in[1]); }},
      {"lsgan_g", [](Ops in) { return lsgan_losses(in[0], in[0]).g_loss; },
       [](Ops in) { return std::vector<ImageTensor>{lsgan_g_grad(in[0])}; }},
      {"pmse", [](Ops in) { return pmse_loss(in[0], in[1]); },
       [](Ops in) { return pmse_grad(in[0], in[1]); }},
      {"reconstruction",
       [](Ops in) {
         auto [a, b] = halves(in);
         return reconstruction_loss(a, b);
       },
       [](Ops in) {
         auto [a, b] = halves(in);
         return reconstruction_grad(a, b);
       }},
      {"geo_guided",
       [](Ops in) {
         auto [a, b] = halves(in);
         return geo_guided_loss(a, b);
       },
       [](Ops in) {
         auto [a, b] = halves(in);
         return geo_guided_grad(a, b);
       }},
  };
}

size_t kernel_arity(const std::string& name) {
  if (name == "lsgan_g") return 1;
  if (name == "lsgan_d" || name == "pmse") return 2;
  if (name == "reconstruction" || name == "geo_guided") return 6;
  fail(ErrorKind::kValidation, "unknown loss kernel: " + name);
}

double finite_diff_check(const LossKernel& kernel,
                         std::vector<ImageTensor> inputs, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::kValidation, "eps must be > 0");
  const std::vector<ImageTensor> analytic = kernel.grad(inputs);
  if (analytic.size() != inputs.size()) {
    fail(ErrorKind::kValidation, kernel.name + ": gradient arity mismatch");
  }
  double worst = 0.0;
  for (size_t m = 0; m < inputs.size(); ++m) {
    for (size_t i = 0; i < inputs[m].size(); ++i) {
      const double x = inputs[m].values[i];
      inputs[m].values[i] = x + eps;
      const double up = kernel.loss(inputs);
      inputs[m].values[i] = x - eps;
      const double down = kernel.loss(inputs);
      inputs[m].values[i] = x;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        fail(ErrorKind::kValidation, kernel.name + ": non-finite loss while probing");
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[m].values[i];
      const double err = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

nlohmann::json loss_report_to_json(const LossReport& r) {
  return {{"components", {{"gan", r.gan}, {"pmse", r.pmse}, {"rec", r.rec}, {"geo", r.geo}}},
          {"weights",
           {{"gan", r.weights.gan},
            {"pmse", r.weights.pmse},
            {"rec", r.weights.rec},
            {"geo", r.weights.geo}}},
          {"total", r.total}};
}

}  // namespace scenesynth
