// Missingness generators: cell-independent masking (MCAR) and value-dependent
// per-column masking (MNAR). Generators only remove availability, never add
// it, and are deterministic in the seed.
#pragma once

#include <cstdint>

#include "masked.hpp"

namespace drim {

// Standard normal CDF.
double normal_cdf(double x);

// Masks each available cell independently with probability p.
MaskedMatrix apply_mcar(const MaskedMatrix& m, double p, std::uint64_t seed);

// Masks entry i of the column with probability CDF(a*|z_i| + b), where z_i is
// the entry standardized by the column's available mean/std. Throws on fewer
// than 2 available entries or zero variance.
MaskedVector apply_mnar_column(const MaskedVector& col, double a, double b, std::uint64_t seed);

// apply_mnar_column over every column, with per-column derived seeds.
MaskedMatrix apply_mnar(const MaskedMatrix& m, double a, double b, std::uint64_t seed);

}  // namespace drim
