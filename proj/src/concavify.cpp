#include "persuasion/concavify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace persuasion {

namespace {

constexpr double kVertexSnapTol = 1e-12;

// Cross product of (b - a) x (c - a) for points on the value graph.
// Negative when a->b->c turns clockwise, the concave direction for an
// upper hull scanned left to right.
inline double cross(double ax, double av, double bx, double bv, double cx,
                    double cv) {
    return (bx - ax) * (cv - av) - (bv - av) * (cx - ax);
}

}  // namespace

SampledFunction SampledFunction::sample(const std::function<double(double)>& f,
                                        double a, double b, int n,
                                        const std::vector<double>& breakpoints) {
    if (!(a < b)) throw std::invalid_argument("sample: need a < b");
    if (n < 2) throw std::invalid_argument("sample: need at least 2 grid points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + breakpoints.size());
    for (int i = 0; i < n; ++i)
        grid.push_back(a + (b - a) * i / (n - 1));
    grid.back() = b;
    for (double bp : breakpoints)
        if (bp > a && bp < b) grid.push_back(bp);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return y - x <= kVertexSnapTol; }),
               grid.end());

    SampledFunction out;
    out.grid = std::move(grid);
    out.values.reserve(out.grid.size());
    for (double x : out.grid) out.values.push_back(f(x));
    out.validate();
    return out;
}

void SampledFunction::validate() const {
    if (grid.size() != values.size())
        throw std::invalid_argument("sampled function: grid/values length mismatch");
    if (grid.size() < 2)
        throw std::invalid_argument("sampled function: need at least 2 grid points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("sampled function: grid not strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("sampled function: non-finite value");
}

void upper_hull_indices(const std::vector<double>& x, const std::vector<double>& v,
                        std::size_t first, std::size_t last,
                        std::vector<std::size_t>& out) {
    out.clear();
    double vmin = v[first], vmax = v[first];
    for (std::size_t i = first; i <= last; ++i) {
        vmin = std::min(vmin, v[i]);
        vmax = std::max(vmax, v[i]);
    }
    // Collinear points pop as well, keeping only the extreme points of flat
    // segments. The tolerance sits well below the cross product of any
    // genuinely curved triple at usable grid resolutions.
    const double eps = 1e-12 * (x[last] - x[first]) * std::max(1.0, vmax - vmin);
    for (std::size_t i = first; i <= last; ++i) {
        while (out.size() >= 2) {
            std::size_t p = out[out.size() - 2];
            std::size_t q = out[out.size() - 1];
            if (cross(x[p], v[p], x[q], v[q], x[i], v[i]) >= -eps)
                out.pop_back();
            else
                break;
        }
        out.push_back(i);
    }
}

EnvelopeSolution::EnvelopeSolution(std::vector<double> hull_x,
                                   std::vector<double> hull_v)
    : hull_x_(std::move(hull_x)), hull_v_(std::move(hull_v)) {
    if (hull_x_.empty() || hull_x_.size() != hull_v_.size())
        throw std::invalid_argument("envelope: malformed hull");
}

double EnvelopeSolution::value_at(double x) const {
    if (x < hull_x_.front() - kVertexSnapTol || x > hull_x_.back() + kVertexSnapTol)
        throw std::invalid_argument("envelope: evaluation point outside [a,b]");
    auto it = std::lower_bound(hull_x_.begin(), hull_x_.end(), x);
    if (it == hull_x_.end()) return hull_v_.back();
    std::size_t j = static_cast<std::size_t>(it - hull_x_.begin());
    if (hull_x_[j] - x <= kVertexSnapTol || j == 0) return hull_v_[j];
    double t = (x - hull_x_[j - 1]) / (hull_x_[j] - hull_x_[j - 1]);
    return hull_v_[j - 1] + t * (hull_v_[j] - hull_v_[j - 1]);
}

EnvelopeChord EnvelopeSolution::chord_at(double prior) const {
    if (prior < hull_x_.front() - kVertexSnapTol ||
        prior > hull_x_.back() + kVertexSnapTol)
        throw std::invalid_argument("envelope: prior outside [a,b]");
    EnvelopeChord c;
    auto it = std::lower_bound(hull_x_.begin(), hull_x_.end(), prior - kVertexSnapTol);
    std::size_t j = static_cast<std::size_t>(it - hull_x_.begin());
    if (j >= hull_x_.size()) j = hull_x_.size() - 1;
    if (std::fabs(hull_x_[j] - prior) <= kVertexSnapTol) {
        c.is_degenerate = true;
        c.y1 = c.y2 = hull_x_[j];
        c.nu = 1.0;
        return c;
    }
    // prior lies strictly between vertices j-1 and j
    c.is_degenerate = false;
    c.y1 = hull_x_[j - 1];
    c.y2 = hull_x_[j];
    c.nu = (c.y2 - prior) / (c.y2 - c.y1);
    return c;
}

EnvelopeSolution concave_envelope(const SampledFunction& f) {
    f.validate();
    std::vector<std::size_t> idx;
    upper_hull_indices(f.grid, f.values, 0, f.grid.size() - 1, idx);
    std::vector<double> hx, hv;
    hx.reserve(idx.size());
    hv.reserve(idx.size());
    for (std::size_t i : idx) {
        hx.push_back(f.grid[i]);
        hv.push_back(f.values[i]);
    }
    return EnvelopeSolution(std::move(hx), std::move(hv));
}

GarblingSolution optimal_garbling(const SampledFunction& f, double prior) {
    EnvelopeSolution env = concave_envelope(f);
    EnvelopeChord c = env.chord_at(prior);
    if (c.is_degenerate)
        return {BeliefDistribution::point_mass(prior), env.value_at(prior)};
    return {BeliefDistribution::binary(c.y1, c.y2, prior), env.value_at(prior)};
}

}  // namespace persuasion
