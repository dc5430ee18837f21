#pragma once
#include "xscat/phantom.hpp"

namespace xscat {

// Parametric phantoms for self-contained experiments. Shapes are centered on
// the isocenter; the cylinder axis is z (the rotation axis).

// Homogeneous cube with the given edge length.
VoxelPhantom make_cube_phantom(int n, double voxel_cm, double edge_cm, const Material& material,
                               double density);

// Homogeneous vertical cylinder (radius, height in cm).
VoxelPhantom make_cylinder_phantom(int n, double voxel_cm, double radius_cm, double height_cm,
                                   const Material& material, double density);

// Body cylinder with n_rods equally spaced parallel rod inserts on a
// concentric circle (cement-with-steel-rods style layout).
VoxelPhantom make_rods_phantom(int n, double voxel_cm, double body_radius_cm, double height_cm,
                               const Material& body, double body_density, int n_rods,
                               double rod_radius_cm, double ring_radius_cm, const Material& rod,
                               double rod_density);

// Engine-part-like test object: a light-metal body cylinder with internal
// bores (air) and a ring of dense-metal inserts.
VoxelPhantom make_cylinder_head_phantom(int n, double voxel_cm, const Material& body,
                                        double body_density, const Material& insert,
                                        double insert_density);

} // namespace xscat
