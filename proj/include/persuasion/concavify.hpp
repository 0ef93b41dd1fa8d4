#pragma once

#include <functional>
#include <vector>

#include "persuasion/beliefs.hpp"

namespace persuasion {

/// A real function sampled on a strictly increasing grid covering [a, b].
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    double a() const { return grid.front(); }
    double b() const { return grid.back(); }

    /// Uniform n-point sample on [a, b], with any breakpoints in (a, b)
    /// inserted as extra grid points so kinks are sampled exactly. Throws on
    /// non-finite values.
    static SampledFunction sample(const std::function<double(double)>& f,
                                  double a, double b, int n,
                                  const std::vector<double>& breakpoints = {});

    void validate() const;
};

/// Supporting segment of the envelope at a given prior. Degenerate means the
/// prior is itself a hull vertex (no mixing improves on the function value).
struct EnvelopeChord {
    bool is_degenerate = true;
    double y1 = 0.0;
    double y2 = 0.0;
    double nu = 1.0;  // weight on y1; nu*y1 + (1-nu)*y2 = prior
};

/// Least concave majorant of a sampled function, restricted to the grid.
/// Stores only the hull vertices (collinear interior points are dropped, so
/// the chord through a flat region spans its extreme points).
class EnvelopeSolution {
public:
    EnvelopeSolution(std::vector<double> hull_x, std::vector<double> hull_v);

    const std::vector<double>& hull_x() const { return hull_x_; }
    const std::vector<double>& hull_values() const { return hull_v_; }

    /// Envelope value by linear interpolation between hull vertices.
    double value_at(double x) const;

    /// The supporting segment containing `prior`; throws if prior lies
    /// outside [a, b].
    EnvelopeChord chord_at(double prior) const;

private:
    std::vector<double> hull_x_;
    std::vector<double> hull_v_;
};

/// Upper concave envelope of the sampled points by a monotone scan.
EnvelopeSolution concave_envelope(const SampledFunction& f);

/// Wraps chord_at(prior) as a belief distribution with its attained envelope
/// value: a degenerate chord yields the point mass at the prior.
GarblingSolution optimal_garbling(const SampledFunction& f, double prior);

/// Indices of the upper-hull vertices of the points (x[i], v[i]),
/// i in [first, last]; x must be strictly increasing. Collinear interior
/// points are omitted. Exposed for reuse by grid-heavy search loops.
void upper_hull_indices(const std::vector<double>& x,
                        const std::vector<double>& v, std::size_t first,
                        std::size_t last, std::vector<std::size_t>& out);

}  // namespace persuasion
