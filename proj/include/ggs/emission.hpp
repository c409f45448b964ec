#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "ggs/angles.hpp"

namespace ggs {

// Path-erasure source with two mismatched cavities. Times are in units of
// 1/kappa1; kappa2 = rate_ratio * kappa1. The single-photon (odd parity)
// heralding sector carries a fixed probability of 1/2.
struct EmissionModel {
    double kappa1 = 1.0;
    double rate_ratio = 1.1;
    double window = std::numeric_limits<double>::infinity();
    double sector_prob = 0.5;

    double kappa2() const { return kappa1 * rate_ratio; }
};

void validate(const EmissionModel& model);

struct DetectionEvent {
    double t = 0.0;
    double alpha = kQuarterPi;
    int detector_tag = 0;
};

// Monitored tilt of a click at time t:
//   tan(alpha) = sqrt(kappa1/kappa2) * exp(-(kappa1 - kappa2) t / 2).
// Crosses pi/4 exactly once, at t* = ln(kappa2/kappa1) / (kappa2 - kappa1).
double alpha_of_time(const EmissionModel& model, double t);
double crossing_time(const EmissionModel& model);

// Conditional single-click density (kappa1 e^(-kappa1 t) + kappa2 e^(-kappa2 t))/2,
// renormalized to [0, window].
double click_time_pdf(const EmissionModel& model, double t);
DetectionEvent click_time_sample(const EmissionModel& model, std::mt19937_64& rng);

// Fidelity of the tilted pair against (|01> + |10>)/sqrt(2):
// F(alpha) = (1 + sin(2 alpha)) / 2.
double fidelity_of_alpha(double alpha);

struct NaiveWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double overall_success = 0.0;  // sector_prob * window mass
};

// Post-selection interval F(alpha(t)) >= 1 - epsilon around the crossing
// time, located by root bracketing and integrated by adaptive quadrature
// (relative error <= 1e-8).
NaiveWindow naive_window_mass(const EmissionModel& model, double epsilon);

// sector_prob * E_t[p_s(alpha(t))]: the strict first-attempt success rate of
// repairing every finite-entanglement click.
double adaptive_expected_success(const EmissionModel& model);

// Numeric helpers (exposed for the verification suite).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol);
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-13);

} // namespace ggs
