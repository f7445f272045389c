#include "awva/measure.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "awva/errors.hpp"
#include "awva/quad.hpp"
#include "awva/simd.hpp"

namespace awva {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr std::uint64_t kPhotonDomain = 1;
constexpr std::size_t kChunk = 1 << 16;

}  // namespace

MeasurementModel::MeasurementModel(const GaussianPointer& pointer_in, const TwoLevelState& pre_in,
                                   const TwoLevelState& post_in, const CouplingConfig& coupling_in)
    : pointer(pointer_in),
      pre(pre_in),
      post(post_in),
      coupling(coupling_in),
      aw(weak_value(pre_in, post_in)),
      nu(overlap_probability(pre_in, post_in)) {}

MeasurementModel make_imaginary_weak_model(const GaussianPointer& pointer, double g, double b) {
  const double half_pi = std::numbers::pi / 2.0;
  TwoLevelState pre(half_pi, 0.0);
  TwoLevelState post(half_pi, 2.0 * std::atan(-b));
  return MeasurementModel(pointer, pre, post, CouplingConfig{g});
}

double zeta(double x, double g, const WeakValue& aw) {
  const double s = std::sin(x * g);
  const double c = std::cos(x * g);
  return 1.0 + (aw.norm2() - 1.0) * s * s + aw.im * 2.0 * s * c;
}

double zeta_dg(double x, double g, const WeakValue& aw) {
  const double s2 = std::sin(2.0 * x * g);
  const double c2 = std::cos(2.0 * x * g);
  return x * s2 * (aw.norm2() - 1.0) + 2.0 * x * c2 * aw.im;
}

double pointer_density(const GaussianPointer& pointer, double x) {
  const double d = x - pointer.mean;
  return kInvSqrt2Pi / pointer.width() * std::exp(-0.5 * d * d / pointer.variance);
}

std::pair<double, double> quadrature_window(const GaussianPointer& pointer) {
  const double w = pointer.width();
  return {pointer.mean - 10.0 * w, pointer.mean + 10.0 * w};
}

double postselect_probability(const MeasurementModel& m) {
  auto [lo, hi] = quadrature_window(m.pointer);
  const double g = m.coupling.g;
  double integral = integrate(
      [&](double x) { return pointer_density(m.pointer, x) * zeta(x, g, m.aw); }, lo, hi,
      QuadOptions{.rel_tol = 1e-9});
  double pd = m.nu * integral;
  if (!(pd > 0.0)) throw DegenerateModel("post-selection probability vanished");
  return pd > 1.0 ? 1.0 : pd;
}

double post_density(const MeasurementModel& m, double x) {
  return post_density(m, x, postselect_probability(m));
}

double post_density(const MeasurementModel& m, double x, double p_d) {
  return m.nu * pointer_density(m.pointer, x) * zeta(x, m.coupling.g, m.aw) / p_d;
}

namespace {

struct ChunkBuffers {
  std::vector<double> normals, accept_u, xs, zetas;
  ChunkBuffers() : normals(kChunk), accept_u(kChunk), xs(kChunk), zetas(kChunk) {}
};

// One chunk of the accept/reject pipeline; appends accepted x in index order.
void sample_chunk(const MeasurementModel& m, const RandomStream& stream, std::uint64_t i0,
                  std::size_t n, ChunkBuffers& buf, std::vector<double>& accepted) {
  const auto& kern = simd::active_kernels();
  kern.photon_batch(stream.key(), kPhotonDomain, i0, n, buf.normals.data(), buf.accept_u.data());
  const double x0 = m.pointer.mean;
  const double w = m.pointer.width();
  for (std::size_t j = 0; j < n; ++j) buf.xs[j] = x0 + w * buf.normals[j];
  kern.zeta_batch(buf.xs.data(), n, m.coupling.g, m.aw.norm2(), m.aw.im, buf.zetas.data());

  const double nu = m.nu;
  for (std::size_t j = 0; j < n; ++j) {
    double p = nu * buf.zetas[j];
    // nu*zeta is a projection probability when aw comes from the model's
    // states; anything beyond rounding dust is a logic error.
    if (p > 1.0 + 1e-9) throw Error(ErrorKind::numeric, "acceptance probability exceeds 1");
    if (buf.accept_u[j] < p) accepted.push_back(buf.xs[j]);
  }
}

}  // namespace

PhotonBatch sample_photons(const MeasurementModel& m, std::int64_t n_input,
                           const RandomStream& stream, int workers) {
  if (n_input < 1) throw ConfigError("sample_photons requires n_input >= 1");
  const std::size_t n_chunks = (static_cast<std::uint64_t>(n_input) + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> per_chunk(n_chunks);

  auto run_chunk = [&](std::size_t c, ChunkBuffers& buf) {
    std::uint64_t i0 = static_cast<std::uint64_t>(c) * kChunk;
    std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(kChunk, static_cast<std::uint64_t>(n_input) - i0));
    sample_chunk(m, stream, i0, n, buf, per_chunk[c]);
  };

  if (workers <= 1 || n_chunks == 1) {
    ChunkBuffers buf;
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c, buf);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      ChunkBuffers buf;
      while (!failed.load()) {
        std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        try {
          run_chunk(c, buf);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      int nw = std::min<int>(workers, static_cast<int>(n_chunks));
      pool.reserve(static_cast<std::size_t>(nw));
      for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
  }

  PhotonBatch batch;
  batch.n_input = n_input;
  batch.seed = stream.fingerprint();
  for (auto& chunk : per_chunk) {
    batch.accepted_x.insert(batch.accepted_x.end(), chunk.begin(), chunk.end());
  }
  batch.n_accepted = static_cast<std::int64_t>(batch.accepted_x.size());
  return batch;
}

}  // namespace awva
