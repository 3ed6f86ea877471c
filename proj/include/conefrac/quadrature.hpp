#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace conefrac {

enum class QuadratureKind {
    half_line_exp,  ///< s = e^t on (0, inf)
    ray,            ///< s = e^t e^{i angle}, one ray of a sector
    sector_contour, ///< Gamma_theta: in along e^{-i theta}, out along e^{+i theta}
    hyperbola,      ///< smooth deformation of Gamma_{rho,theta} through -rho
    circle,         ///< center + radius e^{i phi}, counterclockwise
};

/// Trapezoid rule in a smooth path parameter u on [u_min, u_max] with
/// step h. Nodes and weights already include the path Jacobian, so an
/// integral is sum_k weights[k] * f(nodes[k]).
class QuadratureRule {
public:
    struct Segment {
        std::function<std::complex<double>(double)> point;
        std::function<std::complex<double>(double)> derivative;
        double orientation = 1.0;
    };

    QuadratureRule(QuadratureKind kind, std::vector<Segment> segments, double u_min, double u_max,
                   double step, double offset = 0.0, bool periodic = false);

    [[nodiscard]] QuadratureKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<std::complex<double>>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<std::complex<double>>& weights() const noexcept { return weights_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::pair<double, double> truncation() const noexcept { return {u_min_, u_max_}; }
    [[nodiscard]] double step() const noexcept { return step_; }

    /// Same step, nodes shifted by half a step. Averaging a sum over this
    /// rule with one over the companion gives the rule with half the step.
    [[nodiscard]] QuadratureRule midpoints() const;
    /// Half the step over the same truncation window.
    [[nodiscard]] QuadratureRule refined() const;

private:
    void build();

    QuadratureKind kind_;
    std::vector<Segment> segments_;
    double u_min_;
    double u_max_;
    double step_;
    double offset_;
    bool periodic_;
    std::vector<std::complex<double>> nodes_;
    std::vector<std::complex<double>> weights_;
};

/// Minimum node count accepted by the factories below.
inline constexpr std::size_t min_quadrature_nodes = 16;

QuadratureRule half_line_rule(double t_min, double t_max, std::size_t count);
QuadratureRule ray_rule(double angle, double t_min, double t_max, std::size_t count);
QuadratureRule sector_contour_rule(double theta, double t_min, double t_max, std::size_t count_per_ray);
/// lambda(u) = -rho cosh u + i rho tan(pi - theta) sinh u, asymptotic to the rays arg = +-theta.
QuadratureRule hyperbola_rule(double rho, double theta, double u_max, std::size_t count);
QuadratureRule circle_rule(std::complex<double> center, double radius, std::size_t count);

/// Number of trapezoid nodes with the given step over [lo, hi] (at least min_quadrature_nodes).
std::size_t nodes_for_step(double lo, double hi, double step);

} // namespace conefrac
