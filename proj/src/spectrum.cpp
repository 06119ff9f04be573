#include "nonsmooth/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "nonsmooth/config.hpp"

namespace nonsmooth {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// |Σ_x 1_A(x) e^{2πi<ξ,x>}|^2 for every ξ (unnormalised).
std::vector<long double> raw_power(const GroupSet& a) {
  const GroupSpec& spec = a.spec();
  require_dense(spec.order(), "spectrum");
  const uint64_t n = spec.order();
  fftw_complex* buf = fftw_alloc_complex(n);
  if (!buf) throw std::bad_alloc();
  std::fill_n(reinterpret_cast<double*>(buf), 2 * n, 0.0);

  // FFTW is row-major (last dimension fastest); our index has the first
  // factor fastest, so the dimensions go in reversed.
  std::vector<int> dims(spec.factors().rbegin(), spec.factors().rend());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (uint64_t i : a) buf[i][0] = 1.0;
  fftw_execute(plan);
  std::vector<long double> out(n);
  for (uint64_t i = 0; i < n; ++i) {
    const long double re = buf[i][0], im = buf[i][1];
    out[i] = re * re + im * im;
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

// Fixed-chunk summation: result does not depend on the thread count.
template <typename F>
long double chunked_sum(uint64_t n, F term) {
  constexpr uint64_t kChunk = 4096;
  const uint64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<long double> partial(chunks, 0.0L);
  const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int64_t c = 0; c < static_cast<int64_t>(chunks); ++c) {
    long double s = 0;
    const uint64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
    for (uint64_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  }
  long double total = 0;
  for (long double s : partial) total += s;
  return total;
}

}  // namespace

long double SpectrumTable::plancherel_sum() const {
  return static_cast<long double>(spec.order()) *
         chunked_sum(values.size(), [&](uint64_t i) { return static_cast<long double>(values[i]); });
}

SpectrumTable spectrum(const GroupSet& a) {
  const auto power = raw_power(a);
  const long double n = static_cast<long double>(a.spec().order());
  SpectrumTable t{a.spec(), std::vector<double>(power.size())};
  for (size_t i = 0; i < power.size(); ++i) t.values[i] = static_cast<double>(power[i] / (n * n));
  return t;
}

SpectralEnergy energy_spectral(const GroupSet& a, unsigned order) {
  if (order < 2 || order > 8 || order % 2 != 0)
    throw std::invalid_argument("energy order must be one of 2, 4, 6, 8; got " + std::to_string(order));
  const auto power = raw_power(a);
  const unsigned m = order / 2;
  // E_{2m} = |Z|^{2m-1} Σ |1̂_A|^{2m} = |Z|^{-1} Σ |F(ξ)|^{2m}.
  const long double total = chunked_sum(power.size(), [&](uint64_t i) {
    long double p = 1;
    for (unsigned k = 0; k < m; ++k) p *= power[i];
    return p;
  });
  SpectralEnergy e;
  e.value = total / static_cast<long double>(a.spec().order());
  const long double nearest = std::nearbyint(e.value);
  e.residual = std::fabs(e.value - nearest);
  if (e.residual < 0.25L && nearest >= 0 && nearest < 0x1p62L)
    e.rounded = Exact(static_cast<uint64_t>(nearest));
  return e;
}

}  // namespace nonsmooth
