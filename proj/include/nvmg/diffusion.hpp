#pragma once

#include <vector>

#include "nvmg/exec.hpp"
#include "nvmg/rng.hpp"
#include "nvmg/voxel_grid.hpp"

namespace nvmg {

// Flat real tensor; diffusion treats voxel grids as r^3 vectors.
using Tensor = std::vector<double>;

// Forward-process tables, 1-based step t in [1, T].
class NoiseSchedule {
 public:
  // Validates 0 < beta < 1, beta nondecreasing.
  static NoiseSchedule from_betas(std::vector<double> betas);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const { return beta_.at(static_cast<std::size_t>(t - 1)); }
  double alpha(int t) const { return alpha_.at(static_cast<std::size_t>(t - 1)); }
  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t - 1)); }
  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

 private:
  std::vector<double> beta_, alpha_, alpha_bar_;
};

// beta linear in t from beta_start (t = 1) to beta_end (t = T).
NoiseSchedule linear_schedule(int steps = 1000, double beta_start = 1e-4, double beta_end = 0.02);

// epsilon-prediction network contract.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Tensor predict_noise(const Tensor& x_t, int t, const NoiseSchedule& sched) const = 0;
};

// Elementwise sqrt(alpha_bar) * x0 + sqrt(1 - alpha_bar) * eps.
Tensor forward_sample(const Tensor& x0, const Tensor& eps, double alpha_bar, Exec exec = Exec::Parallel);
Tensor forward_sample(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& sched,
                      Exec exec = Exec::Parallel);

// ||eps - eps_phi(x_t, t)||^2 with x_t = forward_sample(x0, t, eps).
double ddpm_loss(const Tensor& x0, int t, const Tensor& eps, const Denoiser& denoiser, const NoiseSchedule& sched);

// Posterior mean mu_phi(x_t, t); the reverse step adds sqrt(beta_t) z for t > 1.
Tensor reverse_mean(const Tensor& x_t, int t, const Denoiser& denoiser, const NoiseSchedule& sched,
                    Exec exec = Exec::Parallel);
Tensor reverse_step(const Tensor& x_t, int t, const Denoiser& denoiser, const NoiseSchedule& sched, Rng& rng,
                    Exec exec = Exec::Parallel);

// Runs the chain from x_T ~ N(0, I) of length `size` down to x_0.
Tensor sample_chain(const Denoiser& denoiser, const NoiseSchedule& sched, std::size_t size, Rng& rng,
                    Exec exec = Exec::Parallel);

// Occupancy is encoded as {0, 1} -> {-1, +1}; the final sample is binarized
// with value > threshold.
VoxelGrid sample_grid(const Denoiser& denoiser, const NoiseSchedule& sched, int resolution, Rng& rng,
                      double threshold = 0.0, Exec exec = Exec::Parallel);

Tensor encode_grid(const VoxelGrid& grid);

// Reference denoisers with closed forms.

// Always predicts zero noise.
class ZeroDenoiser final : public Denoiser {
 public:
  Tensor predict_noise(const Tensor& x_t, int, const NoiseSchedule&) const override {
    return Tensor(x_t.size(), 0.0);
  }
};

// Optimal denoiser E[eps | x_t] when every element of x0 is independently
// N(mean, variance). variance = 0 pins the data to a point mass.
class GaussianDenoiser final : public Denoiser {
 public:
  GaussianDenoiser(double mean, double variance);
  Tensor predict_noise(const Tensor& x_t, int t, const NoiseSchedule& sched) const override;

 private:
  double mean_, variance_;
};

// Optimal denoiser for data that is a single fixed tensor.
class TargetDenoiser final : public Denoiser {
 public:
  explicit TargetDenoiser(Tensor target) : target_(std::move(target)) {}
  Tensor predict_noise(const Tensor& x_t, int t, const NoiseSchedule& sched) const override;

 private:
  Tensor target_;
};

}  // namespace nvmg
