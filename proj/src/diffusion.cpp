#include "nvmg/diffusion.hpp"

#include <cmath>

namespace nvmg {

namespace {

void check_step(const NoiseSchedule& sched, int t) {
  if (t < 1 || t > sched.steps())
    throw Error("range", "diffusion step " + std::to_string(t) + " outside [1, " + std::to_string(sched.steps()) + "]");
}

void check_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.size() != b.size()) throw Error("shape", std::string(what) + ": tensor shape mismatch");
}

}  // namespace

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) throw Error("schedule", "schedule needs at least one step");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0 && betas[i] < 1)) throw Error("schedule", "beta must lie in (0, 1)");
    if (i > 0 && betas[i] < betas[i - 1]) throw Error("schedule", "beta must be nondecreasing");
  }
  NoiseSchedule s;
  s.beta_ = std::move(betas);
  s.alpha_.resize(s.beta_.size());
  s.alpha_bar_.resize(s.beta_.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < s.beta_.size(); ++i) {
    s.alpha_[i] = 1.0 - s.beta_[i];
    prod *= s.alpha_[i];
    s.alpha_bar_[i] = prod;
  }
  return s;
}

NoiseSchedule linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw Error("schedule", "schedule needs T >= 1");
  if (!(beta_start > 0 && beta_start <= beta_end && beta_end < 1))
    throw Error("schedule", "need 0 < beta_start <= beta_end < 1");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(t) / (steps - 1);
    betas[static_cast<std::size_t>(t)] = beta_start + (beta_end - beta_start) * f;
  }
  return NoiseSchedule::from_betas(std::move(betas));
}

Tensor forward_sample(const Tensor& x0, const Tensor& eps, double alpha_bar, Exec exec) {
  check_shape(x0, eps, "forward_sample");
  if (!(alpha_bar >= 0 && alpha_bar <= 1)) throw Error("range", "alpha_bar must lie in [0, 1]");
  const double a = std::sqrt(alpha_bar), s = std::sqrt(1.0 - alpha_bar);
  Tensor out(x0.size());
  const auto n = static_cast<std::ptrdiff_t>(x0.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a * x0[static_cast<std::size_t>(i)] + s * eps[static_cast<std::size_t>(i)];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a * x0[static_cast<std::size_t>(i)] + s * eps[static_cast<std::size_t>(i)];
  }
  return out;
}

Tensor forward_sample(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& sched, Exec exec) {
  check_step(sched, t);
  return forward_sample(x0, eps, sched.alpha_bar(t), exec);
}

double ddpm_loss(const Tensor& x0, int t, const Tensor& eps, const Denoiser& denoiser, const NoiseSchedule& sched) {
  const Tensor x_t = forward_sample(x0, t, eps, sched);
  const Tensor pred = denoiser.predict_noise(x_t, t, sched);
  check_shape(eps, pred, "ddpm_loss");
  double loss = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) loss += (eps[i] - pred[i]) * (eps[i] - pred[i]);
  return loss;
}

Tensor reverse_mean(const Tensor& x_t, int t, const Denoiser& denoiser, const NoiseSchedule& sched, Exec exec) {
  check_step(sched, t);
  const Tensor eps = denoiser.predict_noise(x_t, t, sched);
  check_shape(x_t, eps, "reverse_step");
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double coef = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
  Tensor mu(x_t.size());
  const auto n = static_cast<std::ptrdiff_t>(x_t.size());
  auto body = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    mu[k] = inv_sqrt_alpha * (x_t[k] - coef * eps[k]);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
  return mu;
}

Tensor reverse_step(const Tensor& x_t, int t, const Denoiser& denoiser, const NoiseSchedule& sched, Rng& rng,
                    Exec exec) {
  if (t < 1) throw Error("range", "reverse_step needs t >= 1");
  Tensor x = reverse_mean(x_t, t, denoiser, sched, exec);
  if (t > 1) {
    const double sigma = std::sqrt(sched.beta(t));
    for (auto& v : x) v += sigma * standard_normal(rng);
  }
  return x;
}

Tensor sample_chain(const Denoiser& denoiser, const NoiseSchedule& sched, std::size_t size, Rng& rng, Exec exec) {
  Tensor x(size);
  for (auto& v : x) v = standard_normal(rng);
  for (int t = sched.steps(); t >= 1; --t) x = reverse_step(x, t, denoiser, sched, rng, exec);
  return x;
}

VoxelGrid sample_grid(const Denoiser& denoiser, const NoiseSchedule& sched, int resolution, Rng& rng,
                      double threshold, Exec exec) {
  VoxelGrid grid(resolution);
  const Tensor x = sample_chain(denoiser, sched, grid.size(), rng, exec);
  std::vector<std::uint8_t> occ(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) occ[i] = x[i] > threshold ? 1 : 0;
  return VoxelGrid(resolution, grid.frame(), std::move(occ));
}

Tensor encode_grid(const VoxelGrid& grid) {
  Tensor x(grid.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid.occupancy()[i] ? 1.0 : -1.0;
  return x;
}

GaussianDenoiser::GaussianDenoiser(double mean, double variance) : mean_(mean), variance_(variance) {
  if (!(variance >= 0) || !std::isfinite(mean)) throw Error("usage", "GaussianDenoiser needs variance >= 0");
}

Tensor GaussianDenoiser::predict_noise(const Tensor& x_t, int t, const NoiseSchedule& sched) const {
  const double ab = sched.alpha_bar(t);
  const double a = std::sqrt(ab), s = std::sqrt(1.0 - ab);
  const double gain = s / (ab * variance_ + (1.0 - ab));
  Tensor eps(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) eps[i] = gain * (x_t[i] - a * mean_);
  return eps;
}

Tensor TargetDenoiser::predict_noise(const Tensor& x_t, int t, const NoiseSchedule& sched) const {
  check_shape(x_t, target_, "TargetDenoiser");
  const double ab = sched.alpha_bar(t);
  const double a = std::sqrt(ab), s = std::sqrt(1.0 - ab);
  Tensor eps(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) eps[i] = (x_t[i] - a * target_[i]) / s;
  return eps;
}

}  // namespace nvmg
