#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace cohesive {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class LawKind { capped_linear, exponential };

std::string_view to_string(LawKind kind);
LawKind parse_law_kind(std::string_view name);

/// Surface energy density g(xi) dissipated at an interface point whose
/// cumulated opening variation is xi.
///
/// Both shipped families are concave, nondecreasing, start at g(0) = 0 and
/// saturate at kappa:
///   capped_linear: g(xi) = kappa * min(xi / theta, 1),   scale = theta
///   exponential:   g(xi) = kappa * (1 - exp(-xi / delta)), scale = delta
///
/// The derivative is the traction threshold. For capped_linear it is taken
/// as the right derivative at the kink, i.e. g'(theta) = 0.
class CohesiveLaw {
public:
    /// Throws InvalidParameter unless kappa > 0 and scale > 0 (both finite).
    CohesiveLaw(LawKind kind, double kappa, double scale);

    static CohesiveLaw capped_linear(double kappa, double theta) {
        return {LawKind::capped_linear, kappa, theta};
    }
    static CohesiveLaw exponential(double kappa, double decay) {
        return {LawKind::exponential, kappa, decay};
    }

    LawKind kind() const noexcept { return kind_; }
    double kappa() const noexcept { return kappa_; }
    double scale() const noexcept { return scale_; }

    /// g(xi); xi may be +infinity, in which case the result is kappa.
    double evaluate(double xi) const;
    /// g'(xi), in [0, g'(0)] and nonincreasing.
    double derivative(double xi) const;
    /// Left derivative; differs from derivative() only at kinks.
    double derivative_left(double xi) const;
    /// inf{xi > 0 : g(xi) = kappa}; +infinity for strictly increasing laws.
    double threshold() const noexcept;
    /// Openings where g' is discontinuous (empty for smooth laws).
    std::vector<double> kinks() const;

    bool operator==(const CohesiveLaw&) const = default;

private:
    LawKind kind_;
    double kappa_;
    double scale_;
};

struct LawCheck {
    std::string name;
    bool passed = true;
    double worst = 0.0;
};

struct LawReport {
    std::vector<LawCheck> checks;
    bool passed() const;
};

/// Numerical audit of the law axioms on a geometric grid of openings:
/// g(0) = 0, monotone, midpoint concave, bounded by kappa, and g' consistent
/// with centered finite differences away from the kink.
LawReport validate(const CohesiveLaw& law);

/// One law per interface node.
class LawField {
public:
    LawField(std::size_t nodes, const CohesiveLaw& law) : laws_(nodes, law) {}
    explicit LawField(std::vector<CohesiveLaw> laws) : laws_(std::move(laws)) {}

    std::size_t size() const noexcept { return laws_.size(); }
    const CohesiveLaw& operator[](std::size_t node) const { return laws_[node]; }
    const std::vector<CohesiveLaw>& laws() const noexcept { return laws_; }

    /// Throws DimensionMismatch when the field does not cover `nodes` nodes.
    void expect_size(std::size_t nodes) const;

private:
    std::vector<CohesiveLaw> laws_;
};

/// Half-width of the band around theta in which flow-rule and KKT checks are
/// skipped for laws whose derivative jumps there.
inline constexpr double kink_guard_relative = 1e-8;

/// True when xi lies within the guard band of one of the law's kinks.
bool in_kink_guard_band(const CohesiveLaw& law, double xi);

} // namespace cohesive
