#include "xscat/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "xscat/constants.hpp"
#include "xscat/worker_pool.hpp"

namespace xscat {

Vec3 default_voxel_size(const ScanGeometry& g, const std::array<int, 3>& out_dims)
{
    const double fov = g.nu * g.pixel_pitch * g.sod / g.sdd;
    const double h = fov / std::max({out_dims[0], out_dims[1], out_dims[2]});
    return {h, h, h};
}

namespace {

// Band-limited ramp kernel for the equidistant fan/cone geometry, sampled at
// the virtual (isocenter) detector pitch. The 1/2 for the double coverage of
// a 2pi scan is folded in. Hann windowing in frequency space is exactly a
// (1/4, 1/2, 1/4) smoothing of the spatial kernel.
std::vector<double> ramp_kernel(int n, double du, RampWindow window)
{
    auto ramlak = [&](int k) -> double {
        if (k == 0)
            return 1.0 / (8.0 * du * du);
        if (k % 2 == 0)
            return 0.0;
        return -1.0 / (2.0 * constants::pi * constants::pi * k * k * du * du);
    };
    std::vector<double> h(2 * n - 1);
    for (int k = -(n - 1); k <= n - 1; ++k) {
        double v = ramlak(k);
        if (window == RampWindow::hann)
            v = 0.5 * ramlak(k) + 0.25 * (ramlak(k - 1) + ramlak(k + 1));
        h[k + n - 1] = v;
    }
    return h;
}

double angular_span(const std::vector<double>& angles)
{
    // Largest gap treatment of a circular set: span = 2pi - max gap.
    if (angles.size() < 2)
        return 0.0;
    double max_gap = 2.0 * constants::pi + angles.front() - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i)
        max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    return 2.0 * constants::pi - max_gap;
}

} // namespace

Volume fbp_reconstruct(const ProjectionStack& stack, const ScanGeometry& g,
                       const std::array<int, 3>& out_dims, const Vec3& voxel_size,
                       RampWindow window, int workers)
{
    if (stack.images.empty())
        throw std::runtime_error("fbp: empty projection stack");
    const auto& angles = stack.angle_values;
    const double fan = 2.0 * std::atan(0.5 * g.nu * g.pixel_pitch / g.sdd);
    if (angles.size() < 2 || angular_span(angles) + 1e-9 < constants::pi + fan)
        throw std::runtime_error("fbp: insufficient angular coverage (need >= 180 deg + fan)");

    const int nu = stack.nu, nv = stack.nv;
    const int n_views = static_cast<int>(angles.size());
    const double R = g.sod, D = g.sdd;
    const double du = g.pixel_pitch * R / D; // virtual detector at the isocenter
    const double dv = du;

    // Per-view angular weight, circular.
    std::vector<double> dbeta(n_views);
    for (int i = 0; i < n_views; ++i) {
        const double prev = (i == 0) ? angles.back() - 2.0 * constants::pi : angles[i - 1];
        const double next =
            (i == n_views - 1) ? angles.front() + 2.0 * constants::pi : angles[i + 1];
        dbeta[i] = 0.5 * (next - prev);
    }

    const std::vector<double> kernel = ramp_kernel(nu, du, window);

    // Cosine weighting + row-wise ramp convolution of every view.
    std::vector<std::vector<double>> filtered(n_views);
    parallel_for(n_views, workers, [&](std::size_t view) {
        const auto& img = stack.images[view];
        std::vector<double> weighted(static_cast<std::size_t>(nu) * nv);
        for (int iv = 0; iv < nv; ++iv) {
            const double vv = (iv + 0.5 - 0.5 * nv) * dv;
            for (int iu = 0; iu < nu; ++iu) {
                const double uu = (iu + 0.5 - 0.5 * nu) * du;
                weighted[static_cast<std::size_t>(iv) * nu + iu] =
                    img.at(iu, iv) * R / std::sqrt(R * R + uu * uu + vv * vv);
            }
        }
        auto& q = filtered[view];
        q.assign(static_cast<std::size_t>(nu) * nv, 0.0);
        for (int iv = 0; iv < nv; ++iv) {
            const double* row = weighted.data() + static_cast<std::size_t>(iv) * nu;
            double* out = q.data() + static_cast<std::size_t>(iv) * nu;
            for (int i = 0; i < nu; ++i) {
                double s = 0.0;
                for (int j = 0; j < nu; ++j)
                    s += row[j] * kernel[i - j + nu - 1];
                out[i] = s * du;
            }
        }
    });

    Volume vol = make_volume(out_dims[0], out_dims[1], out_dims[2], voxel_size);
    const double x0 = -0.5 * out_dims[0] * voxel_size.x;
    const double y0 = -0.5 * out_dims[1] * voxel_size.y;
    const double z0 = -0.5 * out_dims[2] * voxel_size.z;

    parallel_for(out_dims[2], workers, [&](std::size_t slice) {
        const int iz = static_cast<int>(slice);
        const double z = z0 + (iz + 0.5) * voxel_size.z;
        for (int view = 0; view < n_views; ++view) {
            const double beta = angles[view];
            const double cb = std::cos(beta), sb = std::sin(beta);
            const double* q = filtered[view].data();
            for (int iy = 0; iy < out_dims[1]; ++iy) {
                const double y = y0 + (iy + 0.5) * voxel_size.y;
                for (int ix = 0; ix < out_dims[0]; ++ix) {
                    const double x = x0 + (ix + 0.5) * voxel_size.x;
                    const double s_comp = x * cb + y * sb;
                    const double t_comp = -x * sb + y * cb;
                    const double L = R - s_comp;
                    if (L <= 1e-9)
                        continue;
                    const double pu = (R * t_comp / L) / du + 0.5 * nu - 0.5;
                    const double pv = (R * z / L) / dv + 0.5 * nv - 0.5;
                    if (pu < 0.0 || pu > nu - 1 || pv < 0.0 || pv > nv - 1)
                        continue;
                    const int u0 = std::min(static_cast<int>(pu), nu - 2);
                    const int v0 = std::min(static_cast<int>(pv), nv - 2);
                    const double fu = pu - u0, fv = pv - v0;
                    const double val =
                        (1 - fu) * (1 - fv) * q[static_cast<std::size_t>(v0) * nu + u0] +
                        fu * (1 - fv) * q[static_cast<std::size_t>(v0) * nu + u0 + 1] +
                        (1 - fu) * fv * q[static_cast<std::size_t>(v0 + 1) * nu + u0] +
                        fu * fv * q[static_cast<std::size_t>(v0 + 1) * nu + u0 + 1];
                    vol.at(ix, iy, iz) +=
                        static_cast<float>(dbeta[view] * R * R / (L * L) * val);
                }
            }
        }
    });

    // 1/cm -> 1/m
    for (auto& v : vol.values)
        v *= 100.0f;
    return vol;
}

std::vector<double> otsu_thresholds(const Volume& vol, int n_classes, int histogram_bins)
{
    if (n_classes < 2 || n_classes > 4)
        throw std::invalid_argument("otsu: n_classes must be in [2,4]");
    if (histogram_bins < n_classes)
        throw std::invalid_argument("otsu: too few histogram bins");

    // Histogram over the interior (5% border margin per axis) so corner
    // artifacts do not pollute the class statistics.
    const auto margin = [&](int n) { return std::max(0, n / 20); };
    const int mx = margin(vol.dims[0]), my = margin(vol.dims[1]), mz = margin(vol.dims[2]);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int iz = mz; iz < vol.dims[2] - mz; ++iz)
        for (int iy = my; iy < vol.dims[1] - my; ++iy)
            for (int ix = mx; ix < vol.dims[0] - mx; ++ix) {
                const double v = vol.at(ix, iy, iz);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!(hi > lo))
        throw std::runtime_error("otsu: degenerate histogram");

    const int bins = histogram_bins;
    std::vector<double> count(bins, 0.0);
    const double scale = bins / (hi - lo);
    for (int iz = mz; iz < vol.dims[2] - mz; ++iz)
        for (int iy = my; iy < vol.dims[1] - my; ++iy)
            for (int ix = mx; ix < vol.dims[0] - mx; ++ix) {
                int b = static_cast<int>((vol.at(ix, iy, iz) - lo) * scale);
                b = std::clamp(b, 0, bins - 1);
                count[b] += 1.0;
            }

    // Prefix sums; between-class variance maximization is equivalent to
    // maximizing sum_k S_k^2 / n_k over the class partitions. Dynamic
    // programming over (class, last bin) is exact and matches exhaustive
    // search over all threshold tuples.
    std::vector<double> pc(bins + 1, 0.0), ps(bins + 1, 0.0);
    for (int b = 0; b < bins; ++b) {
        pc[b + 1] = pc[b] + count[b];
        ps[b + 1] = ps[b] + count[b] * (b + 0.5);
    }
    auto score = [&](int b0, int b1) { // class spanning bins [b0, b1)
        const double n = pc[b1] - pc[b0];
        if (n <= 0.0)
            return -std::numeric_limits<double>::infinity();
        const double s = ps[b1] - ps[b0];
        return s * s / n;
    };

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(n_classes + 1, std::vector<double>(bins + 1, neg_inf));
    std::vector<std::vector<int>> arg(n_classes + 1, std::vector<int>(bins + 1, -1));
    best[0][0] = 0.0;
    for (int k = 1; k <= n_classes; ++k)
        for (int b = k; b <= bins; ++b)
            for (int m = k - 1; m < b; ++m) {
                if (best[k - 1][m] == neg_inf)
                    continue;
                const double cand = best[k - 1][m] + score(m, b);
                if (cand > best[k][b]) {
                    best[k][b] = cand;
                    arg[k][b] = m;
                }
            }
    if (best[n_classes][bins] == neg_inf)
        throw std::runtime_error("otsu: degenerate histogram");

    std::vector<int> cuts; // bin indices of the class boundaries
    int b = bins;
    for (int k = n_classes; k >= 1; --k) {
        cuts.push_back(arg[k][b]);
        b = arg[k][b];
    }
    cuts.pop_back(); // drop the leading 0
    std::sort(cuts.begin(), cuts.end());

    std::vector<double> thresholds;
    for (int cut : cuts)
        thresholds.push_back(lo + cut / scale);
    return thresholds;
}

SegmentationResult segment_volume(const Volume& vol, const std::vector<double>& thresholds,
                                  std::vector<ClassSpec> class_map)
{
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw std::runtime_error("segment_volume: thresholds must be strictly increasing");
    if (class_map.size() != thresholds.size() + 1)
        throw std::runtime_error("segment_volume: class_map must cover all " +
                                 std::to_string(thresholds.size() + 1) + " classes");
    SegmentationResult seg;
    seg.thresholds = thresholds;
    seg.class_map = std::move(class_map);
    seg.labels.resize(vol.voxel_count());
    for (std::size_t i = 0; i < vol.values.size(); ++i) {
        const double v = vol.values[i];
        std::uint8_t label = 0;
        while (label < thresholds.size() && v >= thresholds[label])
            ++label;
        seg.labels[i] = label;
    }
    return seg;
}

VoxelPhantom to_density_phantom(const Volume& vol, const SegmentationResult& seg,
                                const std::array<int, 3>& target_dims,
                                std::vector<Material> materials)
{
    if (seg.labels.size() != vol.voxel_count())
        throw std::runtime_error("to_density_phantom: segmentation size mismatch");
    for (std::uint8_t label : seg.labels)
        if (label >= seg.class_map.size())
            throw std::runtime_error("to_density_phantom: unmapped label " +
                                     std::to_string(label));

    const Vec3 vs{vol.voxel_size.x * vol.dims[0] / target_dims[0],
                  vol.voxel_size.y * vol.dims[1] / target_dims[1],
                  vol.voxel_size.z * vol.dims[2] / target_dims[2]};
    VoxelPhantom ph = make_empty_phantom(target_dims[0], target_dims[1], target_dims[2], vs,
                                         std::move(materials));

    const int n_labels = static_cast<int>(seg.class_map.size());
    std::vector<std::size_t> votes(n_labels);
    for (int oz = 0; oz < target_dims[2]; ++oz) {
        const int z0 = oz * vol.dims[2] / target_dims[2];
        const int z1 = (oz + 1) * vol.dims[2] / target_dims[2];
        for (int oy = 0; oy < target_dims[1]; ++oy) {
            const int y0 = oy * vol.dims[1] / target_dims[1];
            const int y1 = (oy + 1) * vol.dims[1] / target_dims[1];
            for (int ox = 0; ox < target_dims[0]; ++ox) {
                const int x0 = ox * vol.dims[0] / target_dims[0];
                const int x1 = (ox + 1) * vol.dims[0] / target_dims[0];
                std::fill(votes.begin(), votes.end(), 0);
                double rho_sum = 0.0;
                std::size_t n = 0;
                for (int iz = z0; iz < z1; ++iz)
                    for (int iy = y0; iy < y1; ++iy)
                        for (int ix = x0; ix < x1; ++ix) {
                            const std::uint8_t label = seg.labels[vol.index(ix, iy, iz)];
                            ++votes[label];
                            rho_sum += seg.class_map[label].density;
                            ++n;
                        }
                int mode = 0;
                for (int l = 1; l < n_labels; ++l)
                    if (votes[l] >= votes[mode])
                        mode = l; // ties go to the higher label
                const ClassSpec& cls = seg.class_map[mode];
                const std::size_t cell = ph.index(ox, oy, oz);
                if (cls.material_id == 0) {
                    ph.material_id[cell] = 0;
                    ph.density[cell] = 0.0f;
                } else {
                    ph.material_id[cell] = static_cast<std::uint8_t>(cls.material_id);
                    ph.density[cell] = static_cast<float>(rho_sum / n);
                }
            }
        }
    }
    validate_phantom(ph);
    return ph;
}

ProjectionStack intensity_to_attenuation(const ProjectionStack& intensity,
                                         const DetectorImage& flatfield)
{
    if (flatfield.nu != intensity.nu || flatfield.nv != intensity.nv)
        throw std::runtime_error("intensity_to_attenuation: flatfield dims mismatch");
    std::size_t bad = 0;
    for (double v : flatfield.values)
        if (!(v > 0.0))
            ++bad;
    ProjectionStack out = make_stack(intensity.nu, intensity.nv, intensity.angle_values);
    for (int i = 0; i < intensity.n_angles(); ++i) {
        const auto& img = intensity.images[i];
        for (std::size_t p = 0; p < img.values.size(); ++p) {
            if (!(img.values[p] > 0.0)) {
                ++bad;
                continue;
            }
            out.images[i].values[p] = std::log(flatfield.values[p] / img.values[p]);
        }
    }
    if (bad > 0)
        throw std::runtime_error("intensity_to_attenuation: " + std::to_string(bad) +
                                 " non-positive pixels (underexposed or invalid data)");
    return out;
}

} // namespace xscat
