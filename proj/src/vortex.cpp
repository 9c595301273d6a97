#include "cvlambda/vortex.hpp"

#include "cvlambda/errors.hpp"
#include "cvlambda/sweep.hpp"

#include <cmath>
#include <limits>

namespace cvlambda {

void VortexProfile::validate() const {
    if (!(waist > 0.0)) throw InvalidParams("waist must be positive");
    if (!(epsilon >= 0.0)) throw InvalidParams("epsilon must be nonnegative");
    if (!std::isfinite(charge)) throw InvalidParams("charge must be finite");
}

double lg_amplitude(const VortexProfile& p, double r) {
    if (!(r >= 0.0)) throw InvalidParams("radius must be nonnegative");
    const double x = r / p.waist;
    return p.epsilon * std::pow(x, std::abs(p.charge)) * std::exp(-x * x);
}

std::vector<VortexRow> radial_entanglement_map(const VortexProfile& profile,
                                               const ModelParams& params,
                                               const std::vector<double>& radii,
                                               const VortexMapOptions& options) {
    profile.validate();
    params.validate();
    for (double r : radii)
        if (!(r >= 0.0)) throw InvalidParams("radii must be nonnegative");

    const double phase = profile.charge * options.phi;
    const cd rotation = phase == 0.0 ? cd(1.0, 0.0) : std::polar(1.0, phase);

    std::vector<VortexRow> rows(radii.size());
    parallel_for(radii.size(), options.workers, [&](std::size_t i) {
        VortexRow& row = rows[i];
        row.r = radii[i];
        row.phase = phase;
        row.amplitude = lg_amplitude(profile, row.r);
        try {
            ModelParams local = params;
            local.omega_in = row.amplitude * rotation;
            const auto exit = propagate_mean_field(local, 1.0);
            row.ic_exit = std::norm(exit.omega_c);
            row.is_exit = std::norm(exit.omega_s);
            row.v = entanglement_at_exit(local, options.mode, options.propagation);
        } catch (const Error& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.ic_exit = row.is_exit = row.v = nan;
            row.error = e.kind() + ": " + e.what();
        }
    });
    return rows;
}

}  // namespace cvlambda
