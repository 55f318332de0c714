#include "pwacut/sampling.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/random.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace pwacut {

namespace {

constexpr std::array<unsigned, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,  41,  43,  47,  53,
                                              59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
constexpr std::uint64_t kSkip = 20;

}  // namespace

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double factor = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return result;
}

SampleSet sample_domain(const Domain& domain, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("sample count must be at least 1");
  const std::size_t d = domain.dim();
  if (d > kPrimes.size()) throw Error("sampling supports at most 32 dimensions");
  Rng rng(mix_seed(seed, 0x5A4D));
  std::vector<double> offset(d);
  for (auto& o : offset) o = rng.uniform();

  SampleSet out;
  out.seed = seed;
  out.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  const Vec& half = domain.half_width();
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      double u = radical_inverse(k + kSkip, kPrimes[j]) + offset[j];
      if (u >= 1.0) u -= 1.0;
      const auto jj = static_cast<Eigen::Index>(j);
      out.points(static_cast<Eigen::Index>(k), jj) = (2.0 * u - 1.0) * half[jj];
    }
  }
  return out;
}

namespace {

[[noreturn]] void fail_at(const Vec& x, const std::string& reason) {
  std::ostringstream msg;
  msg << reason << " at (";
  for (Eigen::Index j = 0; j < x.size(); ++j) msg << (j ? ", " : "") << x[j];
  msg << ")";
  throw EvaluationFailure(msg.str(), std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace

void evaluate_samples(SampleSet& samples, const Domain& domain, const VectorFunction& fn) {
  const std::size_t N = samples.size();
  for (std::size_t k = 0; k < N; ++k) {
    const Vec x = domain.to_original(samples.point(k));
    Vec f;
    try {
      f = fn(x);
    } catch (const EvaluationFailure&) {
      throw;
    } catch (const Error& e) {
      fail_at(x, e.what());
    }
    if (k == 0) samples.values.resize(static_cast<Eigen::Index>(N), f.size());
    if (f.size() != samples.values.cols()) fail_at(x, "function output dimension changed");
    if (!f.allFinite()) fail_at(x, "function is not finite");
    samples.values.row(static_cast<Eigen::Index>(k)) = f.transpose();
  }
}

}  // namespace pwacut
