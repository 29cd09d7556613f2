#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>

#include "nvmg/diffusion.hpp"
#include "support.hpp"

using namespace nvmg;

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

// Independent high-precision product of (1 - beta_i) for the linear schedule.
double alpha_bar_oracle(int T, int t, double b1, double bT) {
  Big prod = 1;
  for (int i = 1; i <= t; ++i) {
    const Big beta = T == 1 ? Big(b1) : Big(b1) + (Big(bT) - Big(b1)) * (i - 1) / (T - 1);
    prod *= 1 - beta;
  }
  return prod.convert_to<double>();
}

class EchoDenoiser final : public Denoiser {
 public:
  explicit EchoDenoiser(Tensor eps) : eps_(std::move(eps)) {}
  Tensor predict_noise(const Tensor&, int, const NoiseSchedule&) const override { return eps_; }

 private:
  Tensor eps_;
};

Tensor normals(std::size_t n, Rng& rng) {
  Tensor t(n);
  for (auto& v : t) v = standard_normal(rng);
  return t;
}

double squared_norm(const Tensor& t) {
  double s = 0;
  for (double v : t) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("schedule examples") {
  const NoiseSchedule one = NoiseSchedule::from_betas({0.5});
  CHECK(one.alpha_bar(1) == 0.5);
  const NoiseSchedule two = NoiseSchedule::from_betas({0.1, 0.2});
  CHECK(two.alpha_bar(2) == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(linear_schedule(1, 0.5, 0.5).alpha_bar(1) == 0.5);

  const NoiseSchedule def = linear_schedule();
  CHECK(def.steps() == 1000);
  CHECK(def.beta(1) == 1e-4);
  CHECK(def.beta(1000) == doctest::Approx(0.02).epsilon(1e-15));
  const double oracle = alpha_bar_oracle(1000, 1000, 1e-4, 0.02);
  CHECK(std::abs(def.alpha_bar(1000) - oracle) < 1e-12);
  CHECK(def.alpha_bar(1000) == doctest::Approx(4.04e-5).epsilon(0.01));
}

TEST_CASE("schedule invariants") {
  const NoiseSchedule s = linear_schedule(1000);
  for (int t = 1; t <= s.steps(); ++t) {
    CHECK(s.beta(t) > 0);
    CHECK(s.beta(t) < 1);
    CHECK(s.alpha(t) == 1 - s.beta(t));
    if (t > 1) {
      CHECK(s.beta(t) >= s.beta(t - 1));
      CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
      CHECK(std::abs(s.alpha_bar(t) - s.alpha_bar(t - 1) * s.alpha(t)) <= 1e-15);
    }
    if (t % 97 == 0) CHECK(std::abs(s.alpha_bar(t) - alpha_bar_oracle(1000, t, 1e-4, 0.02)) < 1e-12);
  }
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(NoiseSchedule::from_betas({}), Error);
  CHECK_THROWS_AS(NoiseSchedule::from_betas({0.0}), Error);
  CHECK_THROWS_AS(NoiseSchedule::from_betas({1.0}), Error);
  CHECK_THROWS_AS(NoiseSchedule::from_betas({0.2, 0.1}), Error);
  CHECK_THROWS_AS(linear_schedule(0), Error);
  CHECK_THROWS_AS(linear_schedule(10, 0.02, 0.01), Error);
}

TEST_CASE("forward_sample examples") {
  Rng rng(1);
  const Tensor x0 = normals(50, rng), eps = normals(50, rng);
  CHECK(forward_sample(x0, eps, 1.0) == x0);
  const NoiseSchedule s = linear_schedule();
  const Tensor zero(50, 0.0);
  const Tensor xt = forward_sample(zero, 400, eps, s);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(xt[i] == std::sqrt(1 - s.alpha_bar(400)) * eps[i]);
  CHECK_THROWS_AS(forward_sample(x0, Tensor(3), 0.5), Error);
  CHECK_THROWS_AS(forward_sample(x0, 0, eps, s), Error);
  CHECK_THROWS_AS(forward_sample(x0, 1001, eps, s), Error);
}

TEST_CASE("forward marginal matches composed single steps") {
  // Scalar x0 ~ N(1, 0.5^2); compare x_t drawn in one shot with x_t built
  // from t single-step transitions.
  const NoiseSchedule s = linear_schedule();
  const int t = 150;
  const int n = 100000;
  Rng rng(77);
  double m1 = 0, v1 = 0, m2 = 0, v2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x0 = 1.0 + 0.5 * standard_normal(rng);
    const double a = forward_sample({x0}, t, {standard_normal(rng)}, s)[0];
    double x = x0;
    for (int k = 1; k <= t; ++k) x = std::sqrt(s.alpha(k)) * x + std::sqrt(s.beta(k)) * standard_normal(rng);
    m1 += a, v1 += a * a, m2 += x, v2 += x * x;
  }
  m1 /= n, m2 /= n;
  v1 = v1 / n - m1 * m1;
  v2 = v2 / n - m2 * m2;
  const double ab = s.alpha_bar(t);
  const double var = ab * 0.25 + (1 - ab);
  const double se_mean = std::sqrt(var / n);
  const double se_var = var * std::sqrt(2.0 / (n - 1));
  CHECK(std::abs(m1 - std::sqrt(ab)) < 3 * se_mean);
  CHECK(std::abs(m2 - std::sqrt(ab)) < 3 * se_mean);
  CHECK(std::abs(v1 - var) < 3 * se_var);
  CHECK(std::abs(v2 - var) < 3 * se_var);
}

TEST_CASE("ddpm_loss examples") {
  const NoiseSchedule s = linear_schedule();
  Rng rng(5);
  const Tensor x0 = normals(64, rng), eps = normals(64, rng);
  CHECK(ddpm_loss(x0, 300, eps, EchoDenoiser(eps), s) == 0.0);
  CHECK(ddpm_loss(x0, 300, eps, ZeroDenoiser(), s) == doctest::Approx(squared_norm(eps)).epsilon(1e-15));
  CHECK_THROWS_AS(ddpm_loss(x0, 300, Tensor(2), ZeroDenoiser(), s), Error);

  // Gaussian-optimal denoiser beats the zero denoiser in aggregate and at
  // every step where the noise dominates x_t.
  const double mu = 3.0, var = 0.25;
  const GaussianDenoiser opt(mu, var);
  double opt_total = 0, zero_total = 0;
  for (int batch = 0; batch < 50; ++batch) {
    Tensor data(256), e = normals(256, rng);
    for (auto& v : data) v = mu + std::sqrt(var) * standard_normal(rng);
    const int t = 1 + static_cast<int>(uniform_index(rng, 1000));
    const double lo = ddpm_loss(data, t, e, opt, s), lz = ddpm_loss(data, t, e, ZeroDenoiser(), s);
    opt_total += lo, zero_total += lz;
    if (s.alpha_bar(t) < 0.5) CHECK(lo < lz);
  }
  CHECK(opt_total < zero_total);
}

TEST_CASE("reverse_step examples") {
  const NoiseSchedule tiny = NoiseSchedule::from_betas({1e-12, 1e-12});
  Rng rng(8);
  const Tensor x = normals(10, rng), zero_eps(10, 0.0);
  const Tensor out = reverse_step(x, 2, EchoDenoiser(zero_eps), tiny, rng);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out[i] == doctest::Approx(x[i] / std::sqrt(tiny.alpha(2))).epsilon(1e-5));

  const NoiseSchedule s = linear_schedule();
  Rng r1(3), r2(3);
  const Tensor zero(4, 0.0);
  const Tensor noisy = reverse_step(zero, 500, ZeroDenoiser(), s, r1);
  for (double v : noisy) CHECK(v == std::sqrt(s.beta(500)) * standard_normal(r2));

  // No noise is added at t = 1.
  Rng r3(4);
  const Tensor last = reverse_step(x, 1, ZeroDenoiser(), s, r3);
  CHECK(last == reverse_mean(x, 1, ZeroDenoiser(), s));
  CHECK_THROWS_AS(reverse_step(x, 0, ZeroDenoiser(), s, r3), Error);
}

TEST_CASE("Gaussian-optimal chain recovers the data distribution") {
  const NoiseSchedule s = linear_schedule();
  Rng rng(2024);
  const Tensor x = sample_chain(GaussianDenoiser(3.0, 0.25), s, 2000, rng);
  double mean = 0, sq = 0;
  for (double v : x) mean += v, sq += v * v;
  mean /= 2000.0;
  const double var = sq / 2000.0 - mean * mean;
  CHECK(std::abs(mean - 3.0) < 3 * 0.5 / std::sqrt(2000.0));
  CHECK(std::abs(var - 0.25) < 3 * 0.25 * std::sqrt(2.0 / 1999.0) + 0.01);
}

TEST_CASE("sample_grid examples") {
  const NoiseSchedule s = linear_schedule(10);
  VoxelGrid full(4);
  for (std::size_t i = 0; i < full.size(); ++i) full.set(full.coord(i), true);
  Rng rng(1);
  CHECK(sample_grid(TargetDenoiser(encode_grid(full)), s, 4, rng).count() == 64);

  Rng r2(2);
  CHECK(sample_grid(ZeroDenoiser(), s, 4, r2, std::numeric_limits<double>::infinity()).count() == 0);

  Rng a(9), b(9), c(9);
  const VoxelGrid ga = sample_grid(ZeroDenoiser(), linear_schedule(), 6, a);
  CHECK(ga == sample_grid(ZeroDenoiser(), linear_schedule(), 6, b));
  CHECK(ga == sample_grid(ZeroDenoiser(), linear_schedule(), 6, c, 0.0, Exec::Serial));

  const VoxelGrid target = testing::random_grid(5, 0.4, 3);
  Rng r4(4);
  CHECK(sample_grid(TargetDenoiser(encode_grid(target)), linear_schedule(50), 5, r4) == target);
}

TEST_CASE("encode_grid maps occupancy to +-1") {
  const VoxelGrid g = testing::grid_with(2, {{1, 0, 1}});
  const Tensor t = encode_grid(g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(t[i] == (g.occupied(g.coord(i)) ? 1.0 : -1.0));
}
