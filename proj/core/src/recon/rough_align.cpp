#include "synact/recon/registration.hpp"

#include "synact/error.hpp"
#include "synact/rng.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace synact {
namespace {

struct Feature {
    int x = 0, y = 0;
    double response = 0;
    Vec3d point;
    std::vector<float> descriptor;
};

std::vector<Feature> detect(const RGBDFrame& f, const RoughAlignParams& p) {
    const int w = f.width(), h = f.height();
    const GrayImage& img = f.intensity;
    std::vector<double> ixx(static_cast<std::size_t>(w) * h, 0.0), iyy(ixx.size(), 0.0), ixy(ixx.size(), 0.0);
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            const double gx = (img.at(x + 1, y - 1) + 2 * img.at(x + 1, y) + img.at(x + 1, y + 1)) -
                              (img.at(x - 1, y - 1) + 2 * img.at(x - 1, y) + img.at(x - 1, y + 1));
            const double gy = (img.at(x - 1, y + 1) + 2 * img.at(x, y + 1) + img.at(x + 1, y + 1)) -
                              (img.at(x - 1, y - 1) + 2 * img.at(x, y - 1) + img.at(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            ixx[i] = gx * gx / 64.0;
            iyy[i] = gy * gy / 64.0;
            ixy[i] = gx * gy / 64.0;
        }
    }
    std::vector<double> resp(ixx.size(), 0.0);
    double max_resp = 0;
    const int margin = std::max(p.patch_radius, 2) + 1;
    for (int y = margin; y < h - margin; ++y) {
        for (int x = margin; x < w - margin; ++x) {
            double a = 0, b = 0, c = 0;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    const std::size_t j = static_cast<std::size_t>(y + dy) * w + (x + dx);
                    a += ixx[j];
                    b += iyy[j];
                    c += ixy[j];
                }
            const double r = (a * b - c * c) - p.harris_k * (a + b) * (a + b);
            resp[static_cast<std::size_t>(y) * w + x] = r;
            max_resp = std::max(max_resp, r);
        }
    }
    std::vector<Feature> feats;
    if (max_resp <= 1e-12) return feats;
    const double thresh = 0.005 * max_resp;
    const Intrinsics& k = f.intrinsics;
    for (int y = margin; y < h - margin; ++y) {
        for (int x = margin; x < w - margin; ++x) {
            const double r = resp[static_cast<std::size_t>(y) * w + x];
            if (r <= thresh) continue;
            bool is_max = true;
            for (int dy = -2; dy <= 2 && is_max; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double o = resp[static_cast<std::size_t>(y + dy) * w + (x + dx)];
                    // Ties resolve towards the earlier pixel in scan order.
                    if (o > r || (o == r && (dy < 0 || (dy == 0 && dx < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            const double z = f.depth_m(x, y);
            if (z <= 0 || z > p.max_depth_m) continue;
            Feature ft;
            ft.x = x;
            ft.y = y;
            ft.response = r;
            ft.point = Vec3d((x - k.cx) * z / k.fx, (y - k.cy) * z / k.fy, z);
            feats.push_back(std::move(ft));
        }
    }
    std::stable_sort(feats.begin(), feats.end(), [](const Feature& l, const Feature& r) { return l.response > r.response; });
    if (feats.size() > static_cast<std::size_t>(p.max_corners)) feats.resize(static_cast<std::size_t>(p.max_corners));

    std::vector<Feature> out;
    const int pr = p.patch_radius;
    for (auto& ft : feats) {
        std::vector<float> d;
        d.reserve(static_cast<std::size_t>((2 * pr + 1) * (2 * pr + 1)));
        for (int dy = -pr; dy <= pr; ++dy)
            for (int dx = -pr; dx <= pr; ++dx) d.push_back(img.at(ft.x + dx, ft.y + dy));
        double mean = 0;
        for (float v : d) mean += v;
        mean /= static_cast<double>(d.size());
        double norm = 0;
        for (float& v : d) {
            v = static_cast<float>(v - mean);
            norm += static_cast<double>(v) * v;
        }
        if (norm < 1e-8) continue;
        const float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (float& v : d) v *= inv;
        ft.descriptor = std::move(d);
        out.push_back(std::move(ft));
    }
    return out;
}

float ncc(const std::vector<float>& a, const std::vector<float>& b) {
    float s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Isometry fit_rigid(const std::vector<Vec3d>& src, const std::vector<Vec3d>& dst, const std::vector<std::size_t>& idx) {
    Eigen::Matrix3Xd s(3, static_cast<Eigen::Index>(idx.size())), d(3, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        s.col(static_cast<Eigen::Index>(i)) = src[idx[i]];
        d.col(static_cast<Eigen::Index>(i)) = dst[idx[i]];
    }
    Isometry t;
    t.matrix() = Eigen::umeyama(s, d, false);
    return t;
}

}  // namespace

RoughAlignResult rough_align(const RGBDFrame& a, const RGBDFrame& b, const RoughAlignParams& params) {
    a.validate();
    b.validate();
    if (a.valid_depth_count() < 100 || b.valid_depth_count() < 100)
        throw ContractError("rough_align needs at least 100 valid depth pixels per frame");

    const auto fa = detect(a, params);
    const auto fb = detect(b, params);
    RoughAlignResult res;
    if (fa.empty() || fb.empty()) return res;

    std::vector<int> best_ab(fa.size(), -1), best_ba(fb.size(), -1);
    std::vector<float> score_ab(fa.size(), -2.0f), score_ba(fb.size(), -2.0f);
    for (std::size_t i = 0; i < fa.size(); ++i) {
        for (std::size_t j = 0; j < fb.size(); ++j) {
            const float s = ncc(fa[i].descriptor, fb[j].descriptor);
            if (s > score_ab[i]) {
                score_ab[i] = s;
                best_ab[i] = static_cast<int>(j);
            }
            if (s > score_ba[j]) {
                score_ba[j] = s;
                best_ba[j] = static_cast<int>(i);
            }
        }
    }
    std::vector<Vec3d> pa, pb;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const int j = best_ab[i];
        if (j < 0 || best_ba[static_cast<std::size_t>(j)] != static_cast<int>(i)) continue;
        if (score_ab[i] < params.min_ncc) continue;
        pa.push_back(fa[i].point);
        pb.push_back(fb[static_cast<std::size_t>(j)].point);
    }
    res.matches = pa.size();
    if (pa.size() < 3) return res;

    const double thresh2 = params.inlier_distance_m * params.inlier_distance_m;
    auto inliers_of = [&](const Isometry& t) {
        std::vector<std::size_t> in;
        for (std::size_t i = 0; i < pa.size(); ++i)
            if ((t * pb[i] - pa[i]).squaredNorm() < thresh2) in.push_back(i);
        return in;
    };

    Rng rng(params.seed);
    std::vector<std::size_t> best;
    const std::uint64_t n = pa.size();
    for (int it = 0; it < params.ransac_iterations; ++it) {
        const std::size_t i0 = rng.below(n), i1 = rng.below(n), i2 = rng.below(n);
        if (i0 == i1 || i1 == i2 || i0 == i2) continue;
        const Vec3d e1 = pb[i1] - pb[i0], e2 = pb[i2] - pb[i0];
        if (e1.cross(e2).norm() < 1e-4) continue;  // near-collinear sample
        const Isometry t = fit_rigid(pb, pa, {i0, i1, i2});
        auto in = inliers_of(t);
        if (in.size() > best.size()) best = std::move(in);
        if (best.size() == pa.size()) break;
    }
    if (best.size() < std::max<std::size_t>(3, params.min_inliers)) return res;

    Isometry t = fit_rigid(pb, pa, best);
    for (int refine = 0; refine < 3; ++refine) {
        auto in = inliers_of(t);
        if (in.size() < 3 || in == best) break;
        best = std::move(in);
        t = fit_rigid(pb, pa, best);
    }
    res.transform = t;
    res.inliers = best.size();
    res.success = res.inliers >= std::max<std::size_t>(3, params.min_inliers);
    return res;
}

}  // namespace synact
