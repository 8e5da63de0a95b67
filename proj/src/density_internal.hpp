#pragma once

#include "qpiston/density.hpp"

namespace qpiston::detail {

void require_grid_matches(const SpectralState& state, const SpatialGrid& grid);

WaveSamples sample_wave_tabulated(const SpectralState& state, const SpatialGrid& grid);
WaveSamples sample_wave_reference(const SpectralState& state, const SpatialGrid& grid);

}  // namespace qpiston::detail
