#include "synact/error.hpp"
#include "synact/flow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace synact {
namespace {

constexpr float kIntensityScale = 255.0f;
constexpr float kGradIsZero = 1e-10f;

float sample_clamped(const GrayImage& im, float x, float y) {
    x = std::clamp(x, 0.0f, static_cast<float>(im.width - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(im.height - 1));
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, im.width - 1), y1 = std::min(y0 + 1, im.height - 1);
    const float fx = x - static_cast<float>(x0), fy = y - static_cast<float>(y0);
    const float top = im.at(x0, y0) * (1.0f - fx) + im.at(x1, y0) * fx;
    const float bottom = im.at(x0, y1) * (1.0f - fx) + im.at(x1, y1) * fx;
    return top * (1.0f - fy) + bottom * fy;
}

GrayImage gaussian_blur(const GrayImage& im, double sigma) {
    if (sigma <= 0) return im;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
    for (auto& v : k) v = static_cast<float>(v / sum);
    GrayImage tmp(im.width, im.height), out(im.width, im.height);
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            float acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * im.at(std::clamp(x + i, 0, im.width - 1), y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            float acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(x, std::clamp(y + i, 0, im.height - 1));
            out.at(x, y) = acc;
        }
    return out;
}

GrayImage zoom_out(const GrayImage& im, double factor) {
    const GrayImage smooth = gaussian_blur(im, 0.6 * std::sqrt(1.0 / (factor * factor) - 1.0));
    const int w = std::max(1, static_cast<int>(im.width * factor + 0.5));
    const int h = std::max(1, static_cast<int>(im.height * factor + 0.5));
    GrayImage out(w, h);
    const float sx = static_cast<float>(im.width) / w, sy = static_cast<float>(im.height) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = sample_clamped(smooth, (x + 0.5f) * sx - 0.5f, (y + 0.5f) * sy - 0.5f);
    return out;
}

// Resamples a coarse flow component to (w, h) and rescales its values.
std::vector<float> zoom_in(const std::vector<float>& f, int cw, int ch, int w, int h) {
    GrayImage coarse(cw, ch);
    coarse.data = f;
    std::vector<float> out(static_cast<std::size_t>(w) * h);
    const float sx = static_cast<float>(cw) / w, sy = static_cast<float>(ch) / h;
    const float gain = static_cast<float>(w) / cw;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out[static_cast<std::size_t>(y) * w + x] = gain * sample_clamped(coarse, (x + 0.5f) * sx - 0.5f, (y + 0.5f) * sy - 0.5f);
    return out;
}

void centered_gradient(const GrayImage& im, GrayImage& dx, GrayImage& dy) {
    dx = GrayImage(im.width, im.height);
    dy = GrayImage(im.width, im.height);
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            dx.at(x, y) = 0.5f * (im.at(std::min(x + 1, im.width - 1), y) - im.at(std::max(x - 1, 0), y));
            dy.at(x, y) = 0.5f * (im.at(x, std::min(y + 1, im.height - 1)) - im.at(x, std::max(y - 1, 0)));
        }
}

// Forward differences, zero on the last column/row.
void forward_gradient(const std::vector<float>& f, int w, int h, std::vector<float>& fx, std::vector<float>& fy) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            fx[i] = x + 1 < w ? f[i + 1] - f[i] : 0.0f;
            fy[i] = y + 1 < h ? f[i + w] - f[i] : 0.0f;
        }
}

// Negative adjoint of forward_gradient.
void divergence(const std::vector<float>& p1, const std::vector<float>& p2, int w, int h, std::vector<float>& div) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            float dx, dy;
            if (x == 0) dx = p1[i];
            else if (x == w - 1) dx = -p1[i - 1];
            else dx = p1[i] - p1[i - 1];
            if (y == 0) dy = p2[i];
            else if (y == h - 1) dy = -p2[i - w];
            else dy = p2[i] - p2[i - w];
            if (w == 1) dx = 0;
            if (h == 1) dy = 0;
            div[i] = dx + dy;
        }
}

void median3(std::vector<float>& f, int w, int h) {
    const std::vector<float> src = f;
    std::array<float, 9> win;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int k = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    win[k++] = src[static_cast<std::size_t>(std::clamp(y + dy, 0, h - 1)) * w + std::clamp(x + dx, 0, w - 1)];
            std::nth_element(win.begin(), win.begin() + 4, win.end());
            f[static_cast<std::size_t>(y) * w + x] = win[4];
        }
}

GrayImage warp_plane(const GrayImage& im, const std::vector<float>& u1, const std::vector<float>& u2) {
    GrayImage out(im.width, im.height);
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * im.width + x;
            out.data[i] = sample_clamped(im, static_cast<float>(x) + u1[i], static_cast<float>(y) + u2[i]);
        }
    return out;
}

double energy_scaled(const GrayImage& i0, const GrayImage& i1, const std::vector<float>& u1, const std::vector<float>& u2,
                     double lambda) {
    const int w = i0.width, h = i0.height;
    std::vector<float> u1x(u1.size()), u1y(u1.size()), u2x(u1.size()), u2y(u1.size());
    forward_gradient(u1, w, h, u1x, u1y);
    forward_gradient(u2, w, h, u2x, u2y);
    const GrayImage warped = warp_plane(i1, u1, u2);
    double e = 0;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        e += std::sqrt(static_cast<double>(u1x[i]) * u1x[i] + static_cast<double>(u1y[i]) * u1y[i]);
        e += std::sqrt(static_cast<double>(u2x[i]) * u2x[i] + static_cast<double>(u2y[i]) * u2y[i]);
        e += lambda * std::abs(static_cast<double>(warped.data[i]) - i0.data[i]);
    }
    return e;
}

GrayImage scaled(const GrayImage& im, float s) {
    GrayImage out = im;
    for (auto& v : out.data) v *= s;
    return out;
}

struct ScaleState {
    std::vector<float> u1, u2, p11, p12, p21, p22;
};

// Dual TV-L1 at one pyramid level. Returns inner iterations of each warp.
void solve_scale(const GrayImage& i0, const GrayImage& i1, ScaleState& s, const FlowParams& prm, bool finest,
                 Tvl1Trace* trace) {
    const int w = i0.width, h = i0.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    GrayImage i1x, i1y;
    centered_gradient(i1, i1x, i1y);
    std::vector<float> rho_c(n), grad(n), div1(n), div2(n), u1x(n), u1y(n), u2x(n), u2y(n);
    const float l_t = static_cast<float>(prm.lambda * prm.theta);
    const float theta = static_cast<float>(prm.theta);
    const float taut = static_cast<float>(prm.tau / prm.theta);
    const double stop = prm.epsilon * prm.epsilon;

    double current_energy = finest ? energy_scaled(i0, i1, s.u1, s.u2, prm.lambda) : 0.0;
    if (finest && trace) trace->energy.push_back(current_energy);

    for (int warp = 0; warp < prm.warps; ++warp) {
        const ScaleState before = finest ? s : ScaleState{};
        const GrayImage i1w = warp_plane(i1, s.u1, s.u2);
        const GrayImage i1wx = warp_plane(i1x, s.u1, s.u2);
        const GrayImage i1wy = warp_plane(i1y, s.u1, s.u2);
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = i1wx.data[i] * i1wx.data[i] + i1wy.data[i] * i1wy.data[i];
            rho_c[i] = i1w.data[i] - i1wx.data[i] * s.u1[i] - i1wy.data[i] * s.u2[i] - i0.data[i];
        }
        int iter = 0;
        double error = std::numeric_limits<double>::infinity();
        while (error > stop && iter < prm.iterations) {
            ++iter;
            divergence(s.p11, s.p12, w, h, div1);
            divergence(s.p21, s.p22, w, h, div2);
            error = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const float gx = i1wx.data[i], gy = i1wy.data[i];
                const float rho = rho_c[i] + gx * s.u1[i] + gy * s.u2[i];
                float d1 = 0.0f, d2 = 0.0f;
                if (rho < -l_t * grad[i]) {
                    d1 = l_t * gx;
                    d2 = l_t * gy;
                } else if (rho > l_t * grad[i]) {
                    d1 = -l_t * gx;
                    d2 = -l_t * gy;
                } else if (grad[i] > kGradIsZero) {
                    const float f = -rho / grad[i];
                    d1 = f * gx;
                    d2 = f * gy;
                }
                const float n1 = s.u1[i] + d1 + theta * div1[i];
                const float n2 = s.u2[i] + d2 + theta * div2[i];
                const float e1 = n1 - s.u1[i], e2 = n2 - s.u2[i];
                error += static_cast<double>(e1) * e1 + static_cast<double>(e2) * e2;
                s.u1[i] = n1;
                s.u2[i] = n2;
            }
            error /= static_cast<double>(n);
            forward_gradient(s.u1, w, h, u1x, u1y);
            forward_gradient(s.u2, w, h, u2x, u2y);
            for (std::size_t i = 0; i < n; ++i) {
                const float g1 = 1.0f + taut * std::sqrt(u1x[i] * u1x[i] + u1y[i] * u1y[i]);
                const float g2 = 1.0f + taut * std::sqrt(u2x[i] * u2x[i] + u2y[i] * u2y[i]);
                s.p11[i] = (s.p11[i] + taut * u1x[i]) / g1;
                s.p12[i] = (s.p12[i] + taut * u1y[i]) / g1;
                s.p21[i] = (s.p21[i] + taut * u2x[i]) / g2;
                s.p22[i] = (s.p22[i] + taut * u2y[i]) / g2;
            }
        }
        if (prm.median_filter) {
            median3(s.u1, w, h);
            median3(s.u2, w, h);
        }
        if (finest) {
            const double e = energy_scaled(i0, i1, s.u1, s.u2, prm.lambda);
            if (e > current_energy) {
                s = before;  // reject the warp and stop
                break;
            }
            current_energy = e;
            if (trace) {
                trace->energy.push_back(e);
                trace->iterations.push_back(iter);
            }
        }
    }
}

}  // namespace

void FlowParams::validate() const {
    if (!(lambda > 0) || !(theta > 0) || !(tau > 0) || !(epsilon > 0) || scales < 1 || warps < 1 || iterations < 1)
        throw ContractError("flow parameters must be positive");
    if (!(scale_factor > 0 && scale_factor < 1)) throw ContractError("flow scale factor must lie in (0, 1)");
}

GrayImage to_gray(std::span<const std::uint8_t> rgb, int width, int height) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw ContractError("RGB buffer size mismatch");
    GrayImage g(width, height);
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] = static_cast<float>((0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2]) / 255.0);
    return g;
}

GrayImage warp_image(const GrayImage& image, const FlowField& flow) {
    if (flow.width != image.width || flow.height != image.height) throw ContractError("flow and image sizes differ");
    return warp_plane(image, flow.u, flow.v);
}

double tvl1_energy(const GrayImage& prev, const GrayImage& next, const FlowField& flow, double lambda) {
    if (prev.width != next.width || prev.height != next.height || flow.width != prev.width || flow.height != prev.height)
        throw ContractError("tvl1_energy size mismatch");
    return energy_scaled(scaled(prev, kIntensityScale), scaled(next, kIntensityScale), flow.u, flow.v, lambda);
}

FlowField tvl1_flow(const GrayImage& prev, const GrayImage& next, const FlowParams& params, Tvl1Trace* trace) {
    params.validate();
    if (prev.width != next.width || prev.height != next.height)
        throw ContractError("tvl1_flow images differ in size");
    if (prev.width <= 0 || prev.height <= 0) throw ContractError("tvl1_flow on an empty image");

    // Pyramid; the coarsest level keeps at least ~16 px along the diagonal.
    const double diag = std::hypot(prev.width, prev.height);
    const int max_scales = 1 + static_cast<int>(std::log(std::max(diag / 16.0, 1.0)) / std::log(1.0 / params.scale_factor));
    const int levels = std::clamp(params.scales, 1, std::max(1, max_scales));
    std::vector<GrayImage> p0{scaled(prev, kIntensityScale)}, p1{scaled(next, kIntensityScale)};
    for (int l = 1; l < levels; ++l) {
        p0.push_back(zoom_out(p0.back(), params.scale_factor));
        p1.push_back(zoom_out(p1.back(), params.scale_factor));
    }

    ScaleState s;
    for (int l = levels - 1; l >= 0; --l) {
        const int w = p0[l].width, h = p0[l].height;
        const std::size_t n = static_cast<std::size_t>(w) * h;
        if (l == levels - 1) {
            s.u1.assign(n, 0.0f);
            s.u2.assign(n, 0.0f);
        } else {
            const int cw = p0[l + 1].width, ch = p0[l + 1].height;
            s.u1 = zoom_in(s.u1, cw, ch, w, h);
            s.u2 = zoom_in(s.u2, cw, ch, w, h);
        }
        s.p11.assign(n, 0.0f);
        s.p12.assign(n, 0.0f);
        s.p21.assign(n, 0.0f);
        s.p22.assign(n, 0.0f);
        solve_scale(p0[l], p1[l], s, params, l == 0, trace);
    }

    FlowField out(prev.width, prev.height);
    out.u = std::move(s.u1);
    out.v = std::move(s.u2);
    return out;
}

}  // namespace synact
