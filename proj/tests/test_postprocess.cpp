#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "xscat/constants.hpp"
#include "xscat/postprocess.hpp"
#include "xscat/rng.hpp"

using namespace xscat;

namespace {

DetectorImage make_image(int nu, int nv, const std::function<double(int, int)>& f)
{
    DetectorImage img(nu, nv);
    for (int v = 0; v < nv; ++v)
        for (int u = 0; u < nu; ++u)
            img.at(u, v) = f(u, v);
    return img;
}

DetectorImage random_image(int nu, int nv, CounterRng& rng)
{
    return make_image(nu, nv, [&](int, int) { return rng.uniform(); });
}

} // namespace

TEST_CASE("interior SG kernel (5,3) equals the closed-form least-squares solution")
{
    const auto k = sg_kernel(2, 2, 3);
    const double expect[5] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
    REQUIRE(k.size() == 5);
    for (int i = 0; i < 5; ++i)
        CHECK(k[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("every SG kernel (interior and truncated) sums to one")
{
    // the mean-preservation invariant in its exact form
    for (int window : {5, 7, 9, 15})
        for (int order : {2, 3})
            for (int left = 0; left <= window / 2; ++left)
                for (int right = 0; right <= window / 2; ++right) {
                    const auto k = sg_kernel(left, right, order);
                    double s = 0.0;
                    for (double v : k)
                        s += v;
                    CHECK(std::abs(s - 1.0) < 1e-10);
                }
}

TEST_CASE("sg_smooth leaves constant and cubic images unchanged")
{
    const SgFilterSpec f{5, 3};
    const DetectorImage constant = make_image(16, 12, [](int, int) { return 3.25; });
    const DetectorImage sc = sg_smooth(constant, f);
    for (double v : sc.values)
        CHECK(v == doctest::Approx(3.25).epsilon(1e-12));

    const DetectorImage cubic = make_image(16, 12, [](int u, int v) {
        const double x = u - 8.0, y = v - 6.0;
        return 0.5 * x * x * x - 2.0 * x * y + 0.25 * y * y * y + 7.0;
    });
    const DetectorImage scubic = sg_smooth(cubic, f);
    for (std::size_t i = 0; i < cubic.values.size(); ++i)
        CHECK(scubic.values[i] == doctest::Approx(cubic.values[i]).epsilon(1e-10));
}

TEST_CASE("sg_smooth preserves the interior mean and rejects tiny images")
{
    CounterRng rng(5);
    const DetectorImage noisy = random_image(32, 32, rng);
    const SgFilterSpec f{7, 3};
    const DetectorImage smooth = sg_smooth(noisy, f);
    // interior mean preserved (kernels sum to 1)
    double m0 = 0.0, m1 = 0.0;
    std::size_t n = 0;
    for (int v = 3; v < 29; ++v)
        for (int u = 3; u < 29; ++u) {
            m0 += noisy.at(u, v);
            m1 += smooth.at(u, v);
            ++n;
        }
    // interior outputs depend only on window sums; means agree to rounding
    CHECK(m1 / n == doctest::Approx(m0 / n).epsilon(0.02));

    CHECK_THROWS_AS(sg_smooth(make_image(4, 4, [](int, int) { return 1.0; }), f),
                    std::runtime_error);
    CHECK_THROWS_AS(sg_smooth(noisy, SgFilterSpec{4, 3}), std::runtime_error);
    CHECK_THROWS_AS(sg_smooth(noisy, SgFilterSpec{5, 5}), std::runtime_error);
}

TEST_CASE("interpolate_angles: identity, midpoint, exact linear recovery, errors")
{
    CounterRng rng(9);
    const std::vector<double> angles = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};

    // identity when target == source
    ProjectionStack s = make_stack(8, 8, {0.0, 2.0, 4.0});
    for (auto& img : s.images)
        img = random_image(8, 8, rng);
    const ProjectionStack same = interpolate_angles(s, {0.0, 2.0, 4.0});
    for (int i = 0; i < 3; ++i)
        CHECK(same.images[i].values == s.images[i].values);

    // midpoint between two identical images is that image
    ProjectionStack twin = make_stack(8, 8, {0.0, 2.0});
    const DetectorImage base = random_image(8, 8, rng);
    twin.images[0] = base;
    twin.images[1] = base;
    const ProjectionStack mid = interpolate_angles(twin, {0.0, 1.0, 2.0});
    for (std::size_t p = 0; p < base.values.size(); ++p)
        CHECK(mid.images[1].values[p] == doctest::Approx(base.values[p]).epsilon(1e-15));

    // per-pixel linear dependence on angle is recovered exactly
    ProjectionStack lin = make_stack(4, 4, {0.0, 2.0, 4.0});
    const DetectorImage slope = random_image(4, 4, rng);
    const DetectorImage offset = random_image(4, 4, rng);
    for (int i = 0; i < 3; ++i)
        for (std::size_t p = 0; p < slope.values.size(); ++p)
            lin.images[i].values[p] =
                offset.values[p] + slope.values[p] * lin.angle_values[i];
    const ProjectionStack dense = interpolate_angles(lin, {0.0, 0.5, 1.0, 2.0, 3.0, 4.0});
    for (std::size_t t = 0; t < dense.angle_values.size(); ++t)
        for (std::size_t p = 0; p < slope.values.size(); ++p)
            CHECK(dense.images[t].values[p] ==
                  doctest::Approx(offset.values[p] + slope.values[p] * dense.angle_values[t])
                      .epsilon(1e-12));

    // missing bracket: single source image cannot interpolate
    ProjectionStack lone = make_stack(4, 4, {1.0});
    lone.images[0] = random_image(4, 4, rng);
    CHECK_THROWS_WITH_AS(interpolate_angles(lone, {0.5, 1.0}),
                         doctest::Contains("missing bracket"), std::runtime_error);
}

TEST_CASE("interpolate_angles wraps circularly")
{
    // sources at 90 and 270 degrees; target at 0 needs the wrap bracket
    const double pi = constants::pi;
    ProjectionStack s = make_stack(2, 2, {0.5 * pi, 1.5 * pi});
    s.images[0].values = {1.0, 1.0, 1.0, 1.0};
    s.images[1].values = {3.0, 3.0, 3.0, 3.0};
    const ProjectionStack out = interpolate_angles(s, {0.0, 0.5 * pi, 1.5 * pi});
    // 0 sits midway between 270 (wrapped to -90) and 90: average of 3 and 1
    for (double v : out.images[0].values)
        CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("upsample_image reproduces constants and linear ramps exactly")
{
    const DetectorImage constant = make_image(8, 6, [](int, int) { return 2.5; });
    const DetectorImage up_c = upsample_image(constant, 32, 24);
    for (double v : up_c.values)
        CHECK(v == doctest::Approx(2.5).epsilon(1e-13));

    const DetectorImage ramp = make_image(8, 6, [](int u, int v) { return 3.0 * u - 2.0 * v + 1.0; });
    const DetectorImage up_r = upsample_image(ramp, 32, 24);
    for (int v = 0; v < 24; ++v)
        for (int u = 0; u < 32; ++u) {
            const double x = (u + 0.5) * 8.0 / 32.0 - 0.5;
            const double y = (v + 0.5) * 6.0 / 24.0 - 0.5;
            CHECK(up_r.at(u, v) == doctest::Approx(3.0 * x - 2.0 * y + 1.0).epsilon(1e-12));
        }

    CHECK_THROWS_AS(upsample_image(constant, 4, 24), std::runtime_error);
}

TEST_CASE("upsampling overshoot stays within 12.5% of the local support range")
{
    // single-row image isolates one separable pass; each output is bounded
    // by its four supporting samples plus the cubic overshoot margin
    CounterRng rng(13);
    const int ns = 12, nt = 48;
    DetectorImage row(ns, 1);
    for (auto& v : row.values)
        v = rng.uniform();
    const DetectorImage up = upsample_image(row, nt, 1);

    auto fetch = [&](int i) { // mirror of the documented border rule
        if (i < 0)
            return row.values[0] + i * (row.values[1] - row.values[0]);
        if (i >= ns)
            return row.values[ns - 1] + (i - (ns - 1)) * (row.values[ns - 1] - row.values[ns - 2]);
        return row.values[i];
    };
    for (int i = 0; i < nt; ++i) {
        const double x = (i + 0.5) * static_cast<double>(ns) / nt - 0.5;
        const int base = static_cast<int>(std::floor(x));
        double lo = 1e300, hi = -1e300;
        for (int k = -1; k <= 2; ++k) {
            lo = std::min(lo, fetch(base + k));
            hi = std::max(hi, fetch(base + k));
        }
        const double range = hi - lo;
        CHECK(up.values[i] >= lo - 0.125 * range - 1e-12);
        CHECK(up.values[i] <= hi + 0.125 * range + 1e-12);
    }
}

TEST_CASE("upsample/downsample round trip keeps smooth images (PSNR > 40 dB)")
{
    const DetectorImage smooth = make_image(16, 16, [](int u, int v) {
        return 10.0 + 4.0 * std::sin(0.3 * u) * std::cos(0.25 * v);
    });
    const DetectorImage up = upsample_image(smooth, 64, 64);
    const DetectorImage back = downsample_average(up, 16, 16);
    double mse = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < smooth.values.size(); ++i) {
        const double d = smooth.values[i] - back.values[i];
        mse += d * d;
        peak = std::max(peak, std::abs(smooth.values[i]));
    }
    mse /= smooth.values.size();
    const double psnr = 10.0 * std::log10(peak * peak / mse);
    CHECK(psnr > 40.0);
}

TEST_CASE("all three operators are linear on random input pairs")
{
    CounterRng rng(21);
    const double a = 1.7, b = -0.6;
    const DetectorImage x = random_image(16, 16, rng);
    const DetectorImage y = random_image(16, 16, rng);
    DetectorImage combo(16, 16);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = a * x.values[i] + b * y.values[i];

    const SgFilterSpec f{5, 3};
    const DetectorImage sx = sg_smooth(x, f), sy = sg_smooth(y, f), sc = sg_smooth(combo, f);
    for (std::size_t i = 0; i < sc.values.size(); ++i)
        CHECK(sc.values[i] == doctest::Approx(a * sx.values[i] + b * sy.values[i]).epsilon(1e-10));

    const DetectorImage ux = upsample_image(x, 24, 24), uy = upsample_image(y, 24, 24),
                        uc = upsample_image(combo, 24, 24);
    for (std::size_t i = 0; i < uc.values.size(); ++i)
        CHECK(uc.values[i] == doctest::Approx(a * ux.values[i] + b * uy.values[i]).epsilon(1e-10));

    ProjectionStack sx2 = make_stack(8, 8, {0.0, 1.0});
    ProjectionStack sy2 = make_stack(8, 8, {0.0, 1.0});
    ProjectionStack sc2 = make_stack(8, 8, {0.0, 1.0});
    for (int i = 0; i < 2; ++i) {
        sx2.images[i] = random_image(8, 8, rng);
        sy2.images[i] = random_image(8, 8, rng);
        for (std::size_t p = 0; p < 64; ++p)
            sc2.images[i].values[p] = a * sx2.images[i].values[p] + b * sy2.images[i].values[p];
    }
    const std::vector<double> target{0.0, 0.25, 0.5, 1.0};
    const ProjectionStack ix = interpolate_angles(sx2, target);
    const ProjectionStack iy = interpolate_angles(sy2, target);
    const ProjectionStack ic = interpolate_angles(sc2, target);
    for (std::size_t t = 0; t < target.size(); ++t)
        for (std::size_t p = 0; p < 64; ++p)
            CHECK(ic.images[t].values[p] ==
                  doctest::Approx(a * ix.images[t].values[p] + b * iy.images[t].values[p])
                      .epsilon(1e-12));
}

TEST_CASE("default SG window scales with the detector and stays odd")
{
    const SgFilterSpec big = default_sg_spec(576, 800);
    CHECK(big.window == 15);
    const SgFilterSpec small = default_sg_spec(64, 64);
    CHECK(small.window >= 5);
    CHECK(small.window % 2 == 1);
    CHECK(small.window < 15);
}
