#include "cohesive/cohesive_law.hpp"

#include "cohesive/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cohesive {

std::string_view to_string(LawKind kind)
{
    switch (kind) {
    case LawKind::capped_linear:
        return "capped_linear";
    case LawKind::exponential:
        return "exponential";
    }
    return "unknown";
}

LawKind parse_law_kind(std::string_view name)
{
    if (name == "capped_linear")
        return LawKind::capped_linear;
    if (name == "exponential")
        return LawKind::exponential;
    throw InvalidParameter("unknown law kind '" + std::string(name) + "'");
}

CohesiveLaw::CohesiveLaw(LawKind kind, double kappa, double scale)
    : kind_(kind), kappa_(kappa), scale_(scale)
{
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidParameter("cohesive law requires a finite kappa > 0");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InvalidParameter("cohesive law requires a finite scale > 0");
}

double CohesiveLaw::evaluate(double xi) const
{
    if (std::isnan(xi) || xi < 0.0)
        throw DomainError("cohesive law evaluated at a negative opening variation");
    if (std::isinf(xi))
        return kappa_;
    switch (kind_) {
    case LawKind::capped_linear:
        return xi >= scale_ ? kappa_ : kappa_ * (xi / scale_);
    case LawKind::exponential:
        return -kappa_ * std::expm1(-xi / scale_);
    }
    return 0.0;
}

double CohesiveLaw::derivative(double xi) const
{
    if (std::isnan(xi) || xi < 0.0)
        throw DomainError("cohesive law derivative at a negative opening variation");
    if (std::isinf(xi))
        return 0.0;
    switch (kind_) {
    case LawKind::capped_linear:
        return xi < scale_ ? kappa_ / scale_ : 0.0;
    case LawKind::exponential:
        return (kappa_ / scale_) * std::exp(-xi / scale_);
    }
    return 0.0;
}

double CohesiveLaw::derivative_left(double xi) const
{
    if (kind_ == LawKind::capped_linear && xi == scale_)
        return kappa_ / scale_;
    return derivative(xi);
}

double CohesiveLaw::threshold() const noexcept
{
    return kind_ == LawKind::capped_linear ? scale_ : infinity;
}

std::vector<double> CohesiveLaw::kinks() const
{
    if (kind_ == LawKind::capped_linear)
        return {scale_};
    return {};
}

bool in_kink_guard_band(const CohesiveLaw& law, double xi)
{
    for (double kink : law.kinks())
        if (std::abs(xi - kink) < kink_guard_relative * kink)
            return true;
    return false;
}

bool LawReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const LawCheck& c) { return c.passed; });
}

namespace {

std::vector<double> audit_grid(double scale)
{
    // 0, then 1e-6 .. 1e3 * scale, 20 points per decade.
    std::vector<double> grid{0.0};
    const double lo = std::log10(1e-6);
    const double hi = std::log10(1e3 * scale);
    const int n = static_cast<int>(std::ceil((hi - lo) * 20.0));
    for (int i = 0; i <= n; ++i)
        grid.push_back(std::pow(10.0, lo + (hi - lo) * i / n));
    return grid;
}

} // namespace

LawReport validate(const CohesiveLaw& law)
{
    constexpr double tol = 1e-12;
    const double kappa = law.kappa();
    const auto grid = audit_grid(law.scale());

    LawCheck zero{"g(0) = 0", true, std::abs(law.evaluate(0.0))};
    zero.passed = zero.worst <= tol * kappa;

    LawCheck monotone{"nondecreasing", true, 0.0};
    LawCheck bounded{"bounded by kappa", true, 0.0};
    LawCheck concave{"midpoint concave", true, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = law.evaluate(grid[i]);
        bounded.worst = std::max(bounded.worst, g - kappa);
        if (i > 0)
            monotone.worst = std::max(monotone.worst, law.evaluate(grid[i - 1]) - g);
        if (i + 1 < grid.size()) {
            const double a = grid[i];
            const double b = grid[i + 1];
            const double mid = law.evaluate(0.5 * (a + b));
            const double chord = 0.5 * (law.evaluate(a) + law.evaluate(b));
            concave.worst = std::max(concave.worst, chord - mid);
        }
    }
    bounded.worst = std::max(bounded.worst, std::abs(law.evaluate(infinity) - kappa));
    monotone.passed = monotone.worst <= tol * kappa;
    bounded.passed = bounded.worst <= tol * kappa;
    concave.passed = concave.worst <= tol * kappa;

    LawCheck slope{"derivative matches finite differences", true, 0.0};
    const double slope_scale = law.derivative(0.0);
    for (double xi : grid) {
        const double h = 1e-5 * law.scale();
        if (xi < h || in_kink_guard_band(law, xi))
            continue;
        bool near_kink = false;
        for (double kink : law.kinks())
            near_kink = near_kink || std::abs(xi - kink) <= 2.0 * h;
        if (near_kink)
            continue;
        const double fd = (law.evaluate(xi + h) - law.evaluate(xi - h)) / (2.0 * h);
        const double rel = std::abs(fd - law.derivative(xi)) / slope_scale;
        slope.worst = std::max(slope.worst, rel);
    }
    slope.passed = slope.worst <= 1e-6;

    LawCheck finite{"g'(0) finite", std::isfinite(slope_scale), 0.0};

    return LawReport{{zero, monotone, bounded, concave, slope, finite}};
}

void LawField::expect_size(std::size_t nodes) const
{
    if (laws_.size() != nodes)
        throw DimensionMismatch("law field has " + std::to_string(laws_.size()) +
                                " entries, interface has " + std::to_string(nodes) + " nodes");
}

} // namespace cohesive
