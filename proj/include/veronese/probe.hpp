#pragma once

// Deterministic probe-point generation: axis-aligned boxes, regular grids and
// seeded uniform samples, with rejection of points too close to a pole locus.

#include <veronese/linalg.hpp>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace veronese {

struct Box3 {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{1.0, 1.0, 1.0};

    bool contains(const Vec3& p) const
    {
        for (int i = 0; i < 3; ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
};

// A gauge measuring how far a point is from the nearest pole; generators
// reject points where it falls below the margin.  An absent gauge means no
// poles.
using PoleGauge = std::function<double(const Vec3&)>;

inline std::vector<Vec3> grid_points(const Box3& box, const std::array<int, 3>& res)
{
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(res[0]) * res[1] * res[2]);
    for (int i = 0; i < res[0]; ++i)
        for (int j = 0; j < res[1]; ++j)
            for (int k = 0; k < res[2]; ++k) {
                auto coord = [&](int n, int axis) {
                    const int r = res[axis];
                    if (r <= 1) return 0.5 * (box.lo[axis] + box.hi[axis]);
                    return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * n / (r - 1);
                };
                pts.push_back({coord(i, 0), coord(j, 1), coord(k, 2)});
            }
    return pts;
}

inline Vec3 random_point(const Box3& box, std::mt19937_64& rng)
{
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
        std::uniform_real_distribution<double> d(box.lo[i], box.hi[i]);
        p[i] = d(rng);
    }
    return p;
}

inline std::vector<Vec3> sample_pole_free(const Box3& box, int count, std::uint64_t seed,
                                          const PoleGauge& gauge = {}, double margin = 1e-3)
{
    std::mt19937_64 rng(seed);
    std::vector<Vec3> pts;
    pts.reserve(count);
    int guard = 0;
    while (static_cast<int>(pts.size()) < count) {
        if (++guard > 10000 * count)
            throw evaluation_error("pole-free sampling failed; box is dominated by the pole locus");
        Vec3 p = random_point(box, rng);
        if (gauge && gauge(p) < margin) continue;
        pts.push_back(p);
    }
    return pts;
}

} // namespace veronese
