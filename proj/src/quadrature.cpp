#include "conefrac/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "conefrac/error.hpp"

namespace conefrac {

using std::complex;

QuadratureRule::QuadratureRule(QuadratureKind kind, std::vector<Segment> segments, double u_min,
                               double u_max, double step, double offset, bool periodic)
    : kind_(kind), segments_(std::move(segments)), u_min_(u_min), u_max_(u_max), step_(step),
      offset_(offset), periodic_(periodic)
{
    if (!(step_ > 0.0) || !(u_max_ > u_min_)) fail(ErrorCode::InvalidArgument, "degenerate quadrature window");
    build();
}

void QuadratureRule::build()
{
    nodes_.clear();
    weights_.clear();
    const double span = u_max_ - u_min_;
    // periodic rules never revisit u_max (== u_min modulo the period)
    const double slack = periodic_ ? -1e-9 * step_ : 1e-9 * step_;
    std::size_t per_segment = 0;
    for (std::size_t k = 0;; ++k) {
        const double u = (static_cast<double>(k) + offset_) * step_;
        if (u > span + slack) break;
        ++per_segment;
    }
    nodes_.reserve(per_segment * segments_.size());
    weights_.reserve(per_segment * segments_.size());
    for (const auto& seg : segments_) {
        for (std::size_t k = 0; k < per_segment; ++k) {
            const double u = u_min_ + (static_cast<double>(k) + offset_) * step_;
            nodes_.push_back(seg.point(u));
            weights_.push_back(seg.orientation * step_ * seg.derivative(u));
        }
    }
}

QuadratureRule QuadratureRule::midpoints() const
{
    return QuadratureRule(kind_, segments_, u_min_, u_max_, step_, offset_ + 0.5, periodic_);
}

QuadratureRule QuadratureRule::refined() const
{
    return QuadratureRule(kind_, segments_, u_min_, u_max_, 0.5 * step_, 2.0 * offset_, periodic_);
}

std::size_t nodes_for_step(double lo, double hi, double step)
{
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    return std::max(n, min_quadrature_nodes);
}

namespace {

void check_count(std::size_t count)
{
    if (count < min_quadrature_nodes)
        fail(ErrorCode::InvalidArgument, "quadrature rules need at least 16 nodes");
}

double step_for(double t_min, double t_max, std::size_t count)
{
    return (t_max - t_min) / static_cast<double>(count - 1);
}

QuadratureRule::Segment exp_ray(double angle, double orientation)
{
    const complex<double> dir = std::polar(1.0, angle);
    auto point = [dir](double t) { return std::exp(t) * dir; };
    return {point, point, orientation};
}

} // namespace

QuadratureRule half_line_rule(double t_min, double t_max, std::size_t count)
{
    check_count(count);
    return QuadratureRule(QuadratureKind::half_line_exp, {exp_ray(0.0, 1.0)}, t_min, t_max,
                          step_for(t_min, t_max, count));
}

QuadratureRule ray_rule(double angle, double t_min, double t_max, std::size_t count)
{
    check_count(count);
    return QuadratureRule(QuadratureKind::ray, {exp_ray(angle, 1.0)}, t_min, t_max,
                          step_for(t_min, t_max, count));
}

QuadratureRule sector_contour_rule(double theta, double t_min, double t_max, std::size_t count_per_ray)
{
    check_count(count_per_ray);
    // incoming along e^{-i theta} (orientation -1), outgoing along e^{+i theta}
    return QuadratureRule(QuadratureKind::sector_contour, {exp_ray(-theta, -1.0), exp_ray(theta, 1.0)}, t_min,
                          t_max, step_for(t_min, t_max, count_per_ray));
}

QuadratureRule hyperbola_rule(double rho, double theta, double u_max, std::size_t count)
{
    check_count(count);
    if (!(theta > std::numbers::pi / 2 && theta < std::numbers::pi))
        fail(ErrorCode::InvalidArgument, "hyperbola asymptote angle must lie in (pi/2, pi)");
    const double b = rho * std::tan(std::numbers::pi - theta);
    auto point = [rho, b](double u) { return complex<double>(-rho * std::cosh(u), b * std::sinh(u)); };
    auto deriv = [rho, b](double u) { return complex<double>(-rho * std::sinh(u), b * std::cosh(u)); };
    return QuadratureRule(QuadratureKind::hyperbola, {{point, deriv, 1.0}}, -u_max, u_max,
                          step_for(-u_max, u_max, count));
}

QuadratureRule circle_rule(complex<double> center, double radius, std::size_t count)
{
    check_count(count);
    auto point = [center, radius](double phi) { return center + std::polar(radius, phi); };
    auto deriv = [radius](double phi) { return complex<double>(0.0, 1.0) * std::polar(radius, phi); };
    const double two_pi = 2.0 * std::numbers::pi;
    return QuadratureRule(QuadratureKind::circle, {{point, deriv, 1.0}}, 0.0, two_pi,
                          two_pi / static_cast<double>(count), 0.0, true);
}

} // namespace conefrac
