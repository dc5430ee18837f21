#include "xscat/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xscat/constants.hpp"

namespace xscat {

void validate_sg_spec(const SgFilterSpec& f)
{
    if (f.window < 5 || f.window % 2 == 0)
        throw std::runtime_error("sg filter: window must be odd and >= 5");
    if (f.polyorder < 0 || f.polyorder >= f.window)
        throw std::runtime_error("sg filter: polyorder must be < window");
}

SgFilterSpec default_sg_spec(int nu, int nv)
{
    const int smaller = std::min(nu, nv);
    int w = static_cast<int>(std::lround(15.0 * smaller / 576.0));
    w = std::max(5, w | 1);
    w = std::min(w, smaller % 2 ? smaller : smaller - 1);
    return SgFilterSpec{w, 3};
}

std::vector<double> sg_kernel(int left, int right, int polyorder)
{
    const int n = left + right + 1;
    // Truncated windows can hold fewer points than coefficients; dropping
    // the order to n-1 turns the fit into interpolation, which still
    // reproduces polynomials exactly.
    const int order = std::min(polyorder, n - 1);
    const int k = order + 1;

    // Normal equations: (X^T X) a = X^T y with X_{j,m} = x_j^m. The kernel is
    // row 0 of (X^T X)^{-1} X^T, i.e. the weights producing the fitted value
    // at x = 0.
    std::vector<double> xtx(static_cast<std::size_t>(k) * k, 0.0);
    std::vector<double> powers(static_cast<std::size_t>(n) * k);
    for (int j = 0; j < n; ++j) {
        const double x = j - left;
        double p = 1.0;
        for (int m = 0; m < k; ++m) {
            powers[static_cast<std::size_t>(j) * k + m] = p;
            p *= x;
        }
    }
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += powers[static_cast<std::size_t>(j) * k + a] *
                     powers[static_cast<std::size_t>(j) * k + b];
            xtx[static_cast<std::size_t>(a) * k + b] = s;
        }

    // Solve (X^T X) c = e0 by Gaussian elimination with partial pivoting.
    std::vector<double> rhs(k, 0.0);
    rhs[0] = 1.0;
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(xtx[static_cast<std::size_t>(r) * k + col]) >
                std::abs(xtx[static_cast<std::size_t>(pivot) * k + col]))
                pivot = r;
        if (pivot != col) {
            for (int c = 0; c < k; ++c)
                std::swap(xtx[static_cast<std::size_t>(col) * k + c],
                          xtx[static_cast<std::size_t>(pivot) * k + c]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const double diag = xtx[static_cast<std::size_t>(col) * k + col];
        if (diag == 0.0)
            throw std::runtime_error("sg_kernel: singular normal equations");
        for (int r = col + 1; r < k; ++r) {
            const double f = xtx[static_cast<std::size_t>(r) * k + col] / diag;
            for (int c = col; c < k; ++c)
                xtx[static_cast<std::size_t>(r) * k + c] -=
                    f * xtx[static_cast<std::size_t>(col) * k + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> coef(k);
    for (int r = k - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < k; ++c)
            s -= xtx[static_cast<std::size_t>(r) * k + c] * coef[c];
        coef[r] = s / xtx[static_cast<std::size_t>(r) * k + r];
    }

    // kernel_j = sum_m coef_m x_j^m applied to X^T: w_j = (c . powers_j)
    std::vector<double> kernel(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < k; ++m)
            s += coef[m] * powers[static_cast<std::size_t>(j) * k + m];
        kernel[j] = s;
    }
    return kernel;
}

namespace {

// One separable pass along a line of length n.
void sg_pass(const double* in, double* out, int n, int stride, int half, int polyorder,
             const std::vector<std::vector<double>>& kernels)
{
    for (int i = 0; i < n; ++i) {
        const int left = std::min(i, half);
        const int right = std::min(n - 1 - i, half);
        const auto& k = kernels[static_cast<std::size_t>(left) * (half + 1) + right];
        double s = 0.0;
        const double* base = in + static_cast<std::ptrdiff_t>(i - left) * stride;
        for (int j = 0; j < left + right + 1; ++j)
            s += k[j] * base[static_cast<std::ptrdiff_t>(j) * stride];
        out[static_cast<std::ptrdiff_t>(i) * stride] = s;
    }
}

} // namespace

DetectorImage sg_smooth(const DetectorImage& img, const SgFilterSpec& f)
{
    validate_sg_spec(f);
    if (img.nu < f.window || img.nv < f.window)
        throw std::runtime_error("sg_smooth: image dims smaller than filter window");

    const int half = f.window / 2;
    std::vector<std::vector<double>> kernels(static_cast<std::size_t>(half + 1) * (half + 1));
    for (int l = 0; l <= half; ++l)
        for (int r = 0; r <= half; ++r)
            kernels[static_cast<std::size_t>(l) * (half + 1) + r] = sg_kernel(l, r, f.polyorder);

    DetectorImage tmp(img.nu, img.nv), out(img.nu, img.nv);
    for (int iv = 0; iv < img.nv; ++iv)
        sg_pass(img.values.data() + static_cast<std::size_t>(iv) * img.nu,
                tmp.values.data() + static_cast<std::size_t>(iv) * img.nu, img.nu, 1, half,
                f.polyorder, kernels);
    for (int iu = 0; iu < img.nu; ++iu)
        sg_pass(tmp.values.data() + iu, out.values.data() + iu, img.nv, img.nu, half,
                f.polyorder, kernels);
    return out;
}

ProjectionStack interpolate_angles(const ProjectionStack& stack,
                                   const std::vector<double>& target_angles)
{
    const auto& src = stack.angle_values;
    for (std::size_t i = 1; i < src.size(); ++i)
        if (!(src[i] > src[i - 1]))
            throw std::runtime_error("interpolate_angles: source angles not sorted");
    for (std::size_t i = 1; i < target_angles.size(); ++i)
        if (!(target_angles[i] > target_angles[i - 1]))
            throw std::runtime_error("interpolate_angles: target angles not sorted");

    ProjectionStack out = make_stack(stack.nu, stack.nv, target_angles);
    const double period = 2.0 * constants::pi;
    for (std::size_t t = 0; t < target_angles.size(); ++t) {
        const double b = target_angles[t];
        const auto exact = std::lower_bound(src.begin(), src.end(), b);
        if (exact != src.end() && *exact == b) {
            out.images[t] = stack.images[exact - src.begin()];
            continue;
        }
        if (src.size() < 2)
            throw std::runtime_error("interpolate_angles: missing bracket for angle " +
                                     std::to_string(b));
        // circular bracket
        std::size_t hi = std::lower_bound(src.begin(), src.end(), b) - src.begin();
        std::size_t lo;
        double a_lo, a_hi;
        if (hi == 0) { // below the first source angle: wrap the last one down
            lo = src.size() - 1;
            a_lo = src[lo] - period;
            a_hi = src[0];
        } else if (hi == src.size()) { // above the last: wrap the first one up
            lo = src.size() - 1;
            hi = 0;
            a_lo = src[lo];
            a_hi = src[0] + period;
        } else {
            lo = hi - 1;
            a_lo = src[lo];
            a_hi = src[hi];
        }
        const double w = (b - a_lo) / (a_hi - a_lo);
        const auto& img_lo = stack.images[lo];
        const auto& img_hi = stack.images[hi];
        auto& dst = out.images[t];
        for (std::size_t p = 0; p < dst.values.size(); ++p)
            dst.values[p] = (1.0 - w) * img_lo.values[p] + w * img_hi.values[p];
    }
    return out;
}

namespace {

// Sample with linear extrapolation past the borders; keeps ramps exact.
inline double fetch(const double* line, int n, int stride, int i)
{
    if (n == 1)
        return line[0];
    if (i < 0)
        return line[0] + i * (line[stride] - line[0]);
    if (i >= n)
        return line[static_cast<std::ptrdiff_t>(n - 1) * stride] +
               (i - (n - 1)) * (line[static_cast<std::ptrdiff_t>(n - 1) * stride] -
                                line[static_cast<std::ptrdiff_t>(n - 2) * stride]);
    return line[static_cast<std::ptrdiff_t>(i) * stride];
}

void catmull_rom_pass(const double* in, double* out, int n_in, int n_out, int stride_in,
                      int stride_out)
{
    const double scale = static_cast<double>(n_in) / n_out;
    for (int i = 0; i < n_out; ++i) {
        const double x = (i + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(x));
        const double t = x - base;
        const double t2 = t * t, t3 = t2 * t;
        const double w0 = 0.5 * (-t3 + 2.0 * t2 - t);
        const double w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
        const double w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
        const double w3 = 0.5 * (t3 - t2);
        out[static_cast<std::ptrdiff_t>(i) * stride_out] =
            w0 * fetch(in, n_in, stride_in, base - 1) + w1 * fetch(in, n_in, stride_in, base) +
            w2 * fetch(in, n_in, stride_in, base + 1) + w3 * fetch(in, n_in, stride_in, base + 2);
    }
}

} // namespace

DetectorImage upsample_image(const DetectorImage& img, int nu_out, int nv_out)
{
    if (nu_out < img.nu || nv_out < img.nv)
        throw std::runtime_error("upsample_image: target dims must be >= source dims");
    if (img.nu < 1 || img.nv < 1)
        throw std::runtime_error("upsample_image: degenerate source");

    DetectorImage tmp(nu_out, img.nv);
    for (int iv = 0; iv < img.nv; ++iv)
        catmull_rom_pass(img.values.data() + static_cast<std::size_t>(iv) * img.nu,
                         tmp.values.data() + static_cast<std::size_t>(iv) * nu_out, img.nu,
                         nu_out, 1, 1);
    DetectorImage out(nu_out, nv_out);
    for (int iu = 0; iu < nu_out; ++iu)
        catmull_rom_pass(tmp.values.data() + iu, out.values.data() + iu, img.nv, nv_out, nu_out,
                         nu_out);
    return out;
}

DetectorImage downsample_average(const DetectorImage& img, int nu_out, int nv_out)
{
    if (nu_out > img.nu || nv_out > img.nv || nu_out < 1 || nv_out < 1)
        throw std::runtime_error("downsample_average: bad target dims");
    DetectorImage out(nu_out, nv_out);
    for (int ov = 0; ov < nv_out; ++ov) {
        const int v0 = ov * img.nv / nv_out, v1 = (ov + 1) * img.nv / nv_out;
        for (int ou = 0; ou < nu_out; ++ou) {
            const int u0 = ou * img.nu / nu_out, u1 = (ou + 1) * img.nu / nu_out;
            double s = 0.0;
            for (int v = v0; v < v1; ++v)
                for (int u = u0; u < u1; ++u)
                    s += img.at(u, v);
            out.at(ou, ov) = s / ((v1 - v0) * (u1 - u0));
        }
    }
    return out;
}

} // namespace xscat
