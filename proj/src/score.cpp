#include "survlpb/score.hpp"

#include <stdexcept>

namespace survlpb {

double generic_exceedance_from_curve(double beta, double u, std::span<const double> x,
                                     const NonConformityScore& score,
                                     const StepSurvivalCurve& curve,
                                     double positivity_floor) {
    if (!(u >= 0.0)) throw std::invalid_argument("generic_exceedance: u must be >= 0");
    if (!(beta >= 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("generic_exceedance: beta must lie in [0,1]");

    double mass_sum = 0.0;
    double prev = 1.0;
    for (std::size_t j = 0; j < curve.size(); ++j) {
        const double t = curve.knots()[j];
        const double v = curve.values()[j];
        if (t > u) {
            const double before = j == 0 ? 1.0 : curve.values()[j - 1];
            const double mass = before - v;
            if (mass > 0.0 && score.score(x, t) >= beta) mass_sum += mass;
        }
        prev = v;
    }
    // Flat-tail mass: a point at +inf where any score in [0,1] tops out at 1.
    if (prev > 0.0 && 1.0 >= beta) mass_sum += prev;

    return mass_sum / clamp_floor(curve.value_at(u), positivity_floor);
}

double generic_exceedance(double beta, double u, std::span<const double> x,
                          const NonConformityScore& score,
                          const ConditionalSurvivalModel& event_model, double positivity_floor) {
    return generic_exceedance_from_curve(beta, u, x, score, event_model.predict_curve(x),
                                         positivity_floor);
}

}  // namespace survlpb
