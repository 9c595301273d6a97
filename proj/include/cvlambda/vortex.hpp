#pragma once

#include "cvlambda/correlation.hpp"
#include "cvlambda/model.hpp"

#include <string>
#include <vector>

namespace cvlambda {

/// Laguerre–Gaussian input ε (r/w)^{|l|} e^{−r²/w²} e^{ilφ}.
struct VortexProfile {
    double epsilon = 1.0;
    double waist = 1.0;
    double charge = 1.0;  ///< topological charge l, need not be an integer

    void validate() const;
};

double lg_amplitude(const VortexProfile& profile, double r);

struct VortexRow {
    double r = 0.0;
    double amplitude = 0.0;   ///< |Ω(r)| at the entrance
    double ic_exit = 0.0;     ///< |Ω_c(r, ξ=1)|²
    double is_exit = 0.0;     ///< |Ω_s(r, ξ=1)|²
    double v = 0.0;
    double phase = 0.0;       ///< common phase l·φ carried by both exit fields
    std::string error;        ///< non-empty when the point failed; numbers are then NaN
};

struct VortexMapOptions {
    double phi = 0.0;
    PropagationMode mode = PropagationMode::stable;
    unsigned workers = 0;
    PropagationOptions propagation;
};

/// Runs the scalar pipeline independently at each radius with the local input amplitude.
std::vector<VortexRow> radial_entanglement_map(const VortexProfile& profile,
                                               const ModelParams& params,
                                               const std::vector<double>& radii,
                                               const VortexMapOptions& options = {});

}  // namespace cvlambda
