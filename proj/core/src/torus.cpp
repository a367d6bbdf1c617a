// Spectral torus calculus on top of FFTW. Plans are cached per (n, N,
// direction) with unaligned estimates so they can serve any buffer.
#include "zcrit/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace zcrit {

namespace {

struct PlanKey {
  int n;
  int N;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (n != o.n) return n < o.n;
    if (N != o.N) return N < o.N;
    return sign < o.sign;
  }
};

fftw_plan plan_for(const TorusGrid& grid, int sign) {
  // The FFTW planner is not reentrant, and concurrent verification checks hit
  // this cache from several threads; executing a cached plan on fresh buffers
  // is safe, so the lock only covers lookup and creation.
  static std::mutex cache_mutex;
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  PlanKey key{grid.n, grid.N, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<int> dims(grid.axes(), grid.N);
  Field scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(grid.axes(), dims.data(), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

void execute(const TorusGrid& grid, Field& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(grid, sign), buf, buf);
}

// Signed frequency of mode index m on an N-point axis.
int signed_freq(int m, int N) { return m <= N / 2 ? m : m - N; }

std::size_t axis_stride(const TorusGrid& grid, int axis) {
  std::size_t stride = 1;
  for (int a = grid.axes() - 1; a > axis; --a)
    stride *= static_cast<std::size_t>(grid.N);
  return stride;
}

}  // namespace

TorusGrid::TorusGrid(int n_, int N_) : n(n_), N(N_) {
  if (n < 1 || n > 2)
    throw ConfigError("torus complex dimension must be 1 or 2, got " +
                      std::to_string(n));
  if (N < 4 || N % 2 != 0)
    throw ConfigError("torus grid needs an even number of points >= 4, got " +
                      std::to_string(N));
}

std::size_t TorusGrid::index(const std::vector<int>& coords) const {
  std::size_t flat = 0;
  for (int a = 0; a < axes(); ++a)
    flat = flat * static_cast<std::size_t>(N) +
           static_cast<std::size_t>(((coords[a] % N) + N) % N);
  return flat;
}

double TorusGrid::coordinate(std::size_t flat, int axis) const {
  std::size_t stride = axis_stride(*this, axis);
  std::size_t idx = (flat / stride) % static_cast<std::size_t>(N);
  return static_cast<double>(idx) / N;
}

Field derivative(const TorusGrid& grid, const Field& f, int axis) {
  if (axis < 0 || axis >= grid.axes())
    throw ConfigError("derivative axis out of range");
  Field hat = f;
  execute(grid, hat, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  const std::size_t stride = axis_stride(grid, axis);
  const int N = grid.N;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    int m = static_cast<int>((j / stride) % static_cast<std::size_t>(N));
    int k = signed_freq(m, N);
    // Drop the unpaired Nyquist mode so derivatives of real fields stay real.
    double factor = (2 * m == N) ? 0.0 : 2.0 * std::numbers::pi * k;
    hat[j] *= Cx(0.0, factor) * scale;
  }
  execute(grid, hat, FFTW_BACKWARD);
  return hat;
}

Field dz(const TorusGrid& grid, const Field& f, int a) {
  Field fx = derivative(grid, f, 2 * a);
  Field fy = derivative(grid, f, 2 * a + 1);
  Field out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = 0.5 * (fx[j] - Cx(0.0, 1.0) * fy[j]);
  return out;
}

Field dzbar(const TorusGrid& grid, const Field& f, int a) {
  Field fx = derivative(grid, f, 2 * a);
  Field fy = derivative(grid, f, 2 * a + 1);
  Field out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = 0.5 * (fx[j] + Cx(0.0, 1.0) * fy[j]);
  return out;
}

Field truncate_band(const TorusGrid& grid, const Field& f) {
  Field hat = f;
  execute(grid, hat, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  const int band = grid.N / 3;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    bool keep = true;
    for (int a = 0; a < grid.axes(); ++a) {
      std::size_t stride = axis_stride(grid, a);
      int m = static_cast<int>((j / stride) % static_cast<std::size_t>(grid.N));
      if (std::abs(signed_freq(m, grid.N)) > band) {
        keep = false;
        break;
      }
    }
    hat[j] = keep ? hat[j] * scale : Cx(0.0, 0.0);
  }
  execute(grid, hat, FFTW_BACKWARD);
  return hat;
}

double band_residual(const TorusGrid& grid, const Field& f, int band) {
  Field hat = f;
  execute(grid, hat, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    bool outside = false;
    for (int a = 0; a < grid.axes(); ++a) {
      std::size_t stride = axis_stride(grid, a);
      int m = static_cast<int>((j / stride) % static_cast<std::size_t>(grid.N));
      if (std::abs(signed_freq(m, grid.N)) > band) {
        outside = true;
        break;
      }
    }
    if (outside) worst = std::max(worst, std::abs(hat[j]) * scale);
  }
  return worst;
}

Field laplace_resolvent(const TorusGrid& grid, const Field& f, double sigma) {
  Field hat = f;
  execute(grid, hat, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  const int N = grid.N;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    double ksq = 0.0;
    std::size_t rest = j;
    for (int axis = grid.axes() - 1; axis >= 0; --axis) {
      int m = static_cast<int>(rest % static_cast<std::size_t>(N));
      rest /= static_cast<std::size_t>(N);
      int k = signed_freq(m, N);
      ksq += static_cast<double>(k) * k;
    }
    const double pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    hat[j] *= scale / (1.0 + sigma * pi2 * ksq);
  }
  execute(grid, hat, FFTW_BACKWARD);
  return hat;
}

Field multiply(const Field& a, const Field& b) {
  Field out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

Field add(const Field& a, const Field& b) {
  Field out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

Field subtract(const Field& a, const Field& b) {
  Field out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] - b[j];
  return out;
}

Field scale(const Field& a, Cx s) {
  Field out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] * s;
  return out;
}

Field conjugate(const Field& a) {
  Field out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::conj(a[j]);
  return out;
}

Cx mean(const Field& a) {
  Cx sum(0.0, 0.0);
  for (const Cx& v : a) sum += v;
  return sum / static_cast<double>(a.size());
}

double max_abs(const Field& a) {
  double worst = 0.0;
  for (const Cx& v : a) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace zcrit
