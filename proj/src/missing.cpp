#include "missing.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "rng.hpp"

namespace drim {

namespace {
constexpr std::uint64_t kMcarTag = 0x6d636172;  // "mcar"
constexpr std::uint64_t kMnarTag = 0x6d6e6172;  // "mnar"
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

MaskedMatrix apply_mcar(const MaskedMatrix& m, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::invalid_argument, "mcar probability must lie in [0, 1]");
  MaskedMatrix out = m;
  rng::Stream stream = rng::Stream(seed).derive(kMcarTag);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // One draw per cell regardless of current availability, so the mask of
      // an already-holey matrix stays reproducible cell by cell.
      const double u = stream.next_double();
      if (out.mask(i, j) && u < p) {
        out.mask(i, j) = false;
        out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  return out;
}

MaskedVector apply_mnar_column(const MaskedVector& col, double a, double b, std::uint64_t seed) {
  std::size_t m = col.available_count();
  if (m < 2) fail(ErrorCode::invalid_argument, "mnar: need at least 2 available entries");

  double mean = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (col.mask(i)) mean += col.values(i);
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (col.mask(i)) var += (col.values(i) - mean) * (col.values(i) - mean);
  var /= static_cast<double>(m - 1);
  const double sd = std::sqrt(var);
  if (sd == 0.0) fail(ErrorCode::numeric, "mnar: zero-variance column");

  MaskedVector out = col;
  rng::Stream stream = rng::Stream(seed).derive(kMnarTag);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double u = stream.next_double();
    if (!out.mask(i)) continue;
    const double z = std::abs((col.values(i) - mean) / sd);
    if (u < normal_cdf(a * z + b)) {
      out.mask(i) = false;
      out.values(i) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

MaskedMatrix apply_mnar(const MaskedMatrix& m, double a, double b, std::uint64_t seed) {
  MaskedMatrix out = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const MaskedVector col = apply_mnar_column(
        column_of(m, j), a, b, rng::mix(seed ^ rng::mix(static_cast<std::uint64_t>(j))));
    out.values.col(j) = col.values;
    out.mask.col(j) = col.mask;
  }
  return out;
}

}  // namespace drim
