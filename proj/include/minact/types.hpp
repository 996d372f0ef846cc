#ifndef MINACT_TYPES_HPP
#define MINACT_TYPES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace minact {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned box, the compact set K all sampled estimates refer to.
struct Box {
    Vec lo, hi;

    Box() = default;
    Box(Vec lo_, Vec hi_);

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x, double tol = 0.0) const;
    Vec clamp(const Vec& x) const;
    Vec center() const { return 0.5 * (lo + hi); }
    double diameter() const { return (hi - lo).norm(); }

    static Box cube(int dim, double lo, double hi);
};

// Error taxonomy; every failure mode named by the operation contracts maps
// onto one of these so callers (and the CLI) can react specifically.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidCurveError : Error { using Error::Error; };
struct DegenerateCurveError : Error { using Error::Error; };
struct EndpointMismatchError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct MetricError : Error { using Error::Error; };
struct NotInBasinError : Error { using Error::Error; };
struct NotReachableError : Error { using Error::Error; };
struct DegenerateSaddleError : Error { using Error::Error; };
struct EmptyManifoldError : Error { using Error::Error; };

struct DivergenceError : Error {
    double exit_time;
    DivergenceError(const std::string& msg, double t) : Error(msg), exit_time(t) {}
};

struct SolverFailureError : Error {
    double best_residual;
    SolverFailureError(const std::string& msg, double r) : Error(msg), best_residual(r) {}
};

/// Deterministic RNG. mt19937_64 has a standardized bit stream; the value
/// mappings below avoid std::uniform_real_distribution, whose output is
/// implementation-defined, so identical seeds give identical reports anywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// uniform in [0,1)
    double unit();
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    /// standard normal (Box-Muller)
    double normal();
    Vec point_in_box(const Box& box);
    /// uniformly distributed direction on the unit sphere
    Vec unit_vector(int dim);

  private:
    std::uint64_t splitmix();
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Halton sequence point i (0-based) in [0,1)^dim, used for quasi-random
/// sampling sweeps.
Vec halton(std::uint64_t i, int dim);
/// Halton point mapped into a box.
Vec halton_in_box(std::uint64_t i, const Box& box);

} // namespace minact

#endif
