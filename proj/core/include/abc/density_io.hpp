#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "abc/cde.hpp"

namespace abc {

// Columns theta_0..theta_{p-1},g_hat; one row per grid point.
void write_density_csv(std::ostream& out, const DensityEstimate& estimate);

// {N, k, h, d_k_plus_1, kernel, s0, seed} plus the grid description.
nlohmann::ordered_json density_sidecar(const DensityEstimate& estimate);

}  // namespace abc
