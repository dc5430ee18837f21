#include "xscat/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xscat {

MuField::MuField(const VoxelPhantom& ph, double energy_kev)
{
    mass_atten_.resize(ph.materials.size(), 0.0);
    for (std::size_t i = 1; i < ph.materials.size(); ++i)
        if (ph.materials[i].has_tables())
            mass_atten_[i] = ph.materials[i].mu.loglog(energy_kev);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridSpan {
    bool hit = false;
    double t_enter = 0.0, t_exit = 0.0;
};

// Clips the ray parameter against the grid box, starting at the ray origin
// (t >= 0).
GridSpan clip_to_grid(const VoxelPhantom& ph, const Ray& ray)
{
    if (!finite(ray.origin) || !finite(ray.direction))
        throw std::invalid_argument("trace: non-finite ray");
    const Vec3 lo = ph.origin;
    const Vec3 hi = ph.origin + ph.extent();
    double t0 = 0.0, t1 = kInf;
    const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
    const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
    const double l[3] = {lo.x, lo.y, lo.z};
    const double h[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < l[a] || o[a] >= h[a])
                return {};
            continue;
        }
        double ta = (l[a] - o[a]) / d[a];
        double tb = (h[a] - o[a]) / d[a];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t0 < t1))
        return {};
    return {true, t0, t1};
}

struct Walker {
    int idx[3];
    int step[3];
    double t_next[3]; // parameter of next boundary crossing per axis
    double dt[3];     // parameter increment per voxel per axis
};

// Voxel index of a point, with the half-open [low, high) convention.
inline int voxel_of(double p, double org, double inv_h, int n)
{
    int i = static_cast<int>(std::floor((p - org) * inv_h));
    return std::clamp(i, 0, n - 1);
}

Walker start_walk(const VoxelPhantom& ph, const Ray& ray, double t0)
{
    Walker w;
    const Vec3 p = ray.origin + ray.direction * t0;
    const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
    const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
    const double org[3] = {ph.origin.x, ph.origin.y, ph.origin.z};
    const double hs[3] = {ph.voxel_size.x, ph.voxel_size.y, ph.voxel_size.z};
    const double pp[3] = {p.x, p.y, p.z};
    for (int a = 0; a < 3; ++a) {
        w.idx[a] = voxel_of(pp[a], org[a], 1.0 / hs[a], ph.dims[a]);
        if (d[a] > 0.0) {
            w.step[a] = 1;
            w.dt[a] = hs[a] / d[a];
            w.t_next[a] = (org[a] + (w.idx[a] + 1) * hs[a] - o[a]) / d[a];
        } else if (d[a] < 0.0) {
            w.step[a] = -1;
            w.dt[a] = -hs[a] / d[a];
            w.t_next[a] = (org[a] + w.idx[a] * hs[a] - o[a]) / d[a];
        } else {
            w.step[a] = 0;
            w.dt[a] = kInf;
            w.t_next[a] = kInf;
        }
        // Entry exactly on a boundary can leave t_next behind t0.
        while (w.t_next[a] <= t0 && w.step[a] != 0) {
            w.idx[a] += w.step[a];
            w.t_next[a] += w.dt[a];
        }
    }
    return w;
}

} // namespace

double trace_attenuation(const VoxelPhantom& ph, const Ray& ray, const MuField& mu,
                         int step_voxels)
{
    if (step_voxels < 1)
        throw std::invalid_argument("trace_attenuation: step_voxels must be >= 1");
    const GridSpan span = clip_to_grid(ph, ray);
    if (!span.hit)
        return 0.0;

    if (step_voxels > 1) {
        const double h = step_voxels * std::min({ph.voxel_size.x, ph.voxel_size.y, ph.voxel_size.z});
        const double len = span.t_exit - span.t_enter;
        const int n = std::max(1, static_cast<int>(std::ceil(len / h)));
        const double inv_hx = 1.0 / ph.voxel_size.x;
        const double inv_hy = 1.0 / ph.voxel_size.y;
        const double inv_hz = 1.0 / ph.voxel_size.z;
        double depth = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ta = span.t_enter + j * h;
            const double tb = std::min(ta + h, span.t_exit);
            const Vec3 p = ray.origin + ray.direction * (0.5 * (ta + tb));
            const int ix = voxel_of(p.x, ph.origin.x, inv_hx, ph.dims[0]);
            const int iy = voxel_of(p.y, ph.origin.y, inv_hy, ph.dims[1]);
            const int iz = voxel_of(p.z, ph.origin.z, inv_hz, ph.dims[2]);
            depth += mu.at(ph, ph.index(ix, iy, iz)) * (tb - ta);
        }
        return depth;
    }

    Walker w = start_walk(ph, ray, span.t_enter);
    double depth = 0.0;
    double t = span.t_enter;
    while (t < span.t_exit) {
        const double tn = std::min({w.t_next[0], w.t_next[1], w.t_next[2], span.t_exit});
        depth += mu.at(ph, ph.index(w.idx[0], w.idx[1], w.idx[2])) * (tn - t);
        t = tn;
        if (t >= span.t_exit)
            break;
        for (int a = 0; a < 3; ++a) {
            if (w.t_next[a] == tn) {
                w.idx[a] += w.step[a];
                if (w.idx[a] < 0 || w.idx[a] >= ph.dims[a])
                    return depth;
                w.t_next[a] += w.dt[a];
            }
        }
    }
    return depth;
}

double trace_attenuation(const VoxelPhantom& ph, const Ray& ray, double energy_kev,
                         int step_voxels)
{
    return trace_attenuation(ph, ray, MuField(ph, energy_kev), step_voxels);
}

void trace_rho_lengths(const VoxelPhantom& ph, const Ray& ray, std::vector<double>& out)
{
    out.assign(ph.materials.size(), 0.0);
    const GridSpan span = clip_to_grid(ph, ray);
    if (!span.hit)
        return;
    Walker w = start_walk(ph, ray, span.t_enter);
    double t = span.t_enter;
    while (t < span.t_exit) {
        const double tn = std::min({w.t_next[0], w.t_next[1], w.t_next[2], span.t_exit});
        const std::size_t cell = ph.index(w.idx[0], w.idx[1], w.idx[2]);
        out[ph.material_id[cell]] += ph.density[cell] * (tn - t);
        t = tn;
        if (t >= span.t_exit)
            break;
        for (int a = 0; a < 3; ++a) {
            if (w.t_next[a] == tn) {
                w.idx[a] += w.step[a];
                if (w.idx[a] < 0 || w.idx[a] >= ph.dims[a])
                    return;
                w.t_next[a] += w.dt[a];
            }
        }
    }
}

FreePathResult sample_free_path(const VoxelPhantom& ph, const Ray& ray, const MuField& mu,
                                double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("sample_free_path: u must lie in (0,1)");
    const double target = -std::log(u);
    const GridSpan span = clip_to_grid(ph, ray);
    if (!span.hit)
        return {};

    Walker w = start_walk(ph, ray, span.t_enter);
    double depth = 0.0;
    double t = span.t_enter;
    while (t < span.t_exit) {
        const double tn = std::min({w.t_next[0], w.t_next[1], w.t_next[2], span.t_exit});
        const double mu_cell = mu.at(ph, ph.index(w.idx[0], w.idx[1], w.idx[2]));
        const double seg = mu_cell * (tn - t);
        if (depth + seg >= target) {
            const double t_hit = (mu_cell > 0.0) ? t + (target - depth) / mu_cell : tn;
            FreePathResult r;
            r.escaped = false;
            r.point = ray.origin + ray.direction * t_hit;
            r.ix = w.idx[0];
            r.iy = w.idx[1];
            r.iz = w.idx[2];
            return r;
        }
        depth += seg;
        t = tn;
        if (t >= span.t_exit)
            break;
        for (int a = 0; a < 3; ++a) {
            if (w.t_next[a] == tn) {
                w.idx[a] += w.step[a];
                if (w.idx[a] < 0 || w.idx[a] >= ph.dims[a])
                    return {};
                w.t_next[a] += w.dt[a];
            }
        }
    }
    return {};
}

FreePathResult sample_free_path(const VoxelPhantom& ph, const Ray& ray, double energy_kev,
                                double u)
{
    return sample_free_path(ph, ray, MuField(ph, energy_kev), u);
}

} // namespace xscat
