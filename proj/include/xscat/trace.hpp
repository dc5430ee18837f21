#pragma once
#include <vector>

#include "xscat/phantom.hpp"
#include "xscat/scan_geometry.hpp"

namespace xscat {

// Linear attenuation per voxel at a fixed energy: mass attenuation is looked
// up once per material, the hot loop only multiplies by the voxel density.
class MuField {
public:
    MuField(const VoxelPhantom& ph, double energy_kev);

    double at(const VoxelPhantom& ph, std::size_t cell) const
    {
        return mass_atten_[ph.material_id[cell]] * ph.density[cell];
    }

private:
    std::vector<double> mass_atten_; // cm^2/g per material id, 0 for vacuum
};

// Optical depth (dimensionless) accumulated along the ray through the grid.
// step_voxels = 1 walks every voxel boundary exactly (Siddon); step_voxels =
// k > 1 marches in fixed spatial steps of k*min(voxel_size), evaluating mu at
// step midpoints. Rays that miss the grid contribute 0. Ties at voxel
// boundaries follow half-open intervals [low, high).
double trace_attenuation(const VoxelPhantom& ph, const Ray& ray, double energy_kev,
                         int step_voxels = 1);
double trace_attenuation(const VoxelPhantom& ph, const Ray& ray, const MuField& mu,
                         int step_voxels = 1);

// rho*length (g/cm^2) accumulated per material id along the exact voxel walk.
// Optical depth at any energy then follows as sum_m mass_atten_m(E) * out[m].
void trace_rho_lengths(const VoxelPhantom& ph, const Ray& ray, std::vector<double>& out);

struct FreePathResult {
    bool escaped = true;
    Vec3 point;            // interaction position (valid when !escaped)
    int ix = 0, iy = 0, iz = 0; // voxel of the interaction
};

// Samples the free path along the ray: the interaction sits where the
// accumulated optical depth first reaches -ln(u). Always walks voxels
// exactly, independent of any coarse scoring step.
FreePathResult sample_free_path(const VoxelPhantom& ph, const Ray& ray, double energy_kev,
                                double u);
FreePathResult sample_free_path(const VoxelPhantom& ph, const Ray& ray, const MuField& mu,
                                double u);

} // namespace xscat
