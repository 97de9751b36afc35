#pragma once

#include <cmath>
#include <functional>

namespace causalflow::num {

// Global numeric epsilon. Defaults to 1e-12; the environment variable
// CAUSALFLOW_EPS overrides it once at first use. All fixed tolerances in the
// library are expressed as multiples of this knob.
double epsilon();

inline double symmetry_tol() { return epsilon(); }            // 1e-12
inline double psd_tol() { return 100.0 * epsilon(); }          // 1e-10
inline double lyapunov_tol() { return 100.0 * epsilon(); }     // 1e-10
inline double conditioning_tol() { return epsilon(); }         // 1e-12
inline double deterministic_var_tol() { return 0.01 * epsilon(); }  // 1e-14

// phi(z) = (e^z - 1)/z, continuous at 0.
inline double phi1(double z) {
    if (std::abs(z) < 1e-5) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    }
    return std::expm1(z) / z;
}

struct Maximum {
    double arg = 0.0;
    double value = 0.0;
};

// Golden-section maximization of a unimodal function on [lo, hi].
Maximum golden_max(const std::function<double(double)>& f, double lo, double hi,
                   double x_tol);

// Coarse log-grid bracket followed by golden-section refinement.
Maximum grid_refine_max(const std::function<double(double)>& f, double lo,
                        double hi, int grid_points, double x_tol);

}  // namespace causalflow::num
