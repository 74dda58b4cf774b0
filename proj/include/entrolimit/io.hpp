#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "entrolimit/entropy.hpp"
#include "entrolimit/fluid.hpp"
#include "entrolimit/kinetic.hpp"
#include "entrolimit/limit.hpp"

namespace entrolimit {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Header and one row per report: the twelve fixed columns, then the
/// accumulated integrals.
std::string entropy_csv(const std::vector<EntropyReport>& traj);
void write_entropy_csv(const std::filesystem::path& path, const std::vector<EntropyReport>& traj);

/// Columns x_1..x_d, rho, u_1..u_d, p.
void write_fluid_csv(const std::filesystem::path& path, const PhaseGrid& grid,
                     const FluidState& state);

/// Fluid columns followed by rho_f, u_f_1..u_f_d.
void write_limit_csv(const std::filesystem::path& path, const PhaseGrid& grid,
                     const LimitState& U, double gamma);

/// Binary layout: int32 dim, int32 Nx, int32 Nv, double L, double Vmax, then
/// nvel * ncells doubles with the velocity values of each cell contiguous.
void write_snapshot(const std::filesystem::path& path, const DistF& f);
DistF read_snapshot(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace entrolimit
