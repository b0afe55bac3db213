#include "synact/preprocess/preprocess.hpp"

#include "synact/error.hpp"
#include "synact/formats/png_io.hpp"

#include <algorithm>
#include <cmath>

namespace synact {

ClipContainer resample_fps(const ClipContainer& clip, std::uint32_t target_fps) {
    clip.validate();
    if (target_fps == 0) throw ContractError("target fps must be positive");
    if (clip.header.fps == target_fps) return clip;
    const std::size_t n = clip.frames.size();
    ClipContainer out;
    out.header = clip.header;
    out.header.fps = target_fps;
    if (n > 0) {
        const double ratio = static_cast<double>(clip.header.fps) / target_fps;
        const auto count = static_cast<std::size_t>(std::llround(static_cast<double>(n) / ratio));
        out.frames.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(k) * ratio));
            out.frames.push_back(clip.frames[std::min(idx, n - 1)]);
        }
    }
    out.header.frame_count = static_cast<std::uint32_t>(out.frames.size());
    return out;
}

namespace {

std::vector<std::uint8_t> resize_frame(const std::vector<std::uint8_t>& src, int w, int h, int nw, int nh) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(nw) * nh * 3);
    const double sx = static_cast<double>(w) / nw, sy = static_cast<double>(h) / nh;
    for (int y = 0; y < nh; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, h - 1);
        const double ty = fy - y0;
        for (int x = 0; x < nw; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, w - 1);
            const double tx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                auto px = [&](int xx, int yy) { return static_cast<double>(src[(static_cast<std::size_t>(yy) * w + xx) * 3 + c]); };
                const double v = (1 - ty) * ((1 - tx) * px(x0, y0) + tx * px(x1, y0)) +
                                 ty * ((1 - tx) * px(x0, y1) + tx * px(x1, y1));
                out[(static_cast<std::size_t>(y) * nw + x) * 3 + c] =
                    static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

}  // namespace

ClipContainer resize_height(const ClipContainer& clip, int target_height) {
    clip.validate();
    if (target_height <= 0) throw ContractError("target height must be positive");
    const int w = static_cast<int>(clip.header.width), h = static_cast<int>(clip.header.height);
    if (w == 0 || h == 0) throw ContractError("cannot resize a clip with zero dimensions");
    if (h == target_height) return clip;
    const int nw = std::max(1, static_cast<int>(std::lround(static_cast<double>(w) * target_height / h)));
    ClipContainer out;
    out.header = clip.header;
    out.header.width = static_cast<std::uint32_t>(nw);
    out.header.height = static_cast<std::uint32_t>(target_height);
    for (const auto& f : clip.frames) out.frames.push_back(resize_frame(f, w, h, nw, target_height));
    return out;
}

std::vector<int> crop_offsets(int width, int crop, std::optional<int> count) {
    if (crop <= 0) throw ContractError("crop size must be positive");
    if (width < crop) throw ContractError("frame width " + std::to_string(width) + " is smaller than the crop; resize first");
    const int n = count.value_or((width + crop - 1) / crop);
    if (n < 1) throw ContractError("crop count must be >= 1");
    if (n == 1) return {(width - crop) / 2};
    std::vector<int> offsets;
    for (int i = 0; i < n; ++i)
        offsets.push_back(static_cast<int>(std::lround(static_cast<double>(i) * (width - crop) / (n - 1))));
    return offsets;
}

std::vector<CropStack> extract_crops(const ClipContainer& clip, int crop, std::optional<int> count) {
    clip.validate();
    const int w = static_cast<int>(clip.header.width), h = static_cast<int>(clip.header.height);
    if (h != crop) throw ContractError("extract_crops needs frame height " + std::to_string(crop) + ", got " + std::to_string(h));
    std::vector<CropStack> out;
    for (int off : crop_offsets(w, crop, count)) {
        CropStack s;
        s.offset = off;
        s.clip.header = clip.header;
        s.clip.header.width = static_cast<std::uint32_t>(crop);
        for (const auto& f : clip.frames) {
            std::vector<std::uint8_t> c(static_cast<std::size_t>(crop) * crop * 3);
            for (int y = 0; y < crop; ++y)
                std::copy_n(f.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(y) * w + off) * 3),
                            static_cast<std::size_t>(crop) * 3, c.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(y) * crop * 3));
            s.clip.frames.push_back(std::move(c));
        }
        out.push_back(std::move(s));
    }
    return out;
}

void NormalizedClip::validate() const {
    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    for (const auto& f : frames) {
        if (f.size() != n) throw StructuralError("normalized frame has the wrong size");
        for (float v : f)
            if (!(v >= -1.0f && v <= 1.0f)) throw ValidationError("normalized value outside [-1, 1]");
    }
}

std::vector<float> normalize_rgb(std::span<const std::uint8_t> rgb) {
    std::vector<float> out(rgb.size());
    for (std::size_t i = 0; i < rgb.size(); ++i) out[i] = static_cast<float>(rgb[i] / 127.5 - 1.0);
    return out;
}

NormalizedClip normalize_rgb(const ClipContainer& clip, int crop_offset) {
    clip.validate();
    NormalizedClip out;
    out.width = static_cast<int>(clip.header.width);
    out.height = static_cast<int>(clip.header.height);
    out.fps = clip.header.fps;
    out.crop_offset = crop_offset;
    for (const auto& f : clip.frames) out.frames.push_back(normalize_rgb(std::span<const std::uint8_t>(f)));
    return out;
}

std::vector<NormalizedClip> preprocess_clip(const ClipContainer& clip, std::optional<int> crop_count) {
    const ClipContainer sized = resize_height(resample_fps(clip, kGeneratedClipFps), static_cast<int>(kGeneratedClipSize));
    ClipContainer wide = sized;
    if (sized.header.width < kGeneratedClipSize) {
        // Portrait input: scale up until the width reaches the crop size, then
        // keep the central rows.
        const double f = static_cast<double>(kGeneratedClipSize) / sized.header.width;
        const int nh = static_cast<int>(std::ceil(sized.header.height * f));
        ClipContainer big;
        big.header = sized.header;
        big.header.width = kGeneratedClipSize;
        big.header.height = static_cast<std::uint32_t>(nh);
        const int top = (nh - static_cast<int>(kGeneratedClipSize)) / 2;
        for (const auto& fr : sized.frames) {
            const auto r = resize_frame(fr, static_cast<int>(sized.header.width), static_cast<int>(sized.header.height),
                                        static_cast<int>(kGeneratedClipSize), nh);
            const std::size_t row = static_cast<std::size_t>(kGeneratedClipSize) * 3;
            big.frames.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(top * row),
                                    r.begin() + static_cast<std::ptrdiff_t>((top + static_cast<int>(kGeneratedClipSize)) * row));
        }
        big.header.height = kGeneratedClipSize;
        wide = std::move(big);
    }
    std::vector<NormalizedClip> out;
    for (const auto& s : extract_crops(wide, static_cast<int>(kGeneratedClipSize), crop_count))
        out.push_back(normalize_rgb(s.clip, s.offset));
    return out;
}

ClipContainer load_png_sequence(const std::filesystem::path& dir, std::uint32_t fps, const std::string& label) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("PNG sequence directory not found: " + dir.string());
    if (fps == 0) throw ContractError("fps must be positive");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    ClipContainer clip;
    clip.header.fps = fps;
    clip.header.label = label;
    clip.header.provenance = "{}";
    for (const auto& f : files) {
        Texture t = read_png(f);
        if (clip.frames.empty()) {
            clip.header.width = static_cast<std::uint32_t>(t.width);
            clip.header.height = static_cast<std::uint32_t>(t.height);
        } else if (static_cast<std::uint32_t>(t.width) != clip.header.width ||
                   static_cast<std::uint32_t>(t.height) != clip.header.height) {
            throw StructuralError("frame " + f.string() + " changes the sequence resolution");
        }
        clip.frames.push_back(std::move(t.pixels));
    }
    clip.header.frame_count = static_cast<std::uint32_t>(clip.frames.size());
    return clip;
}

}  // namespace synact
