#include "ggs/emission.hpp"

#include <cmath>
#include <stdexcept>

#include "ggs/op_algebra.hpp"
#include "ggs/rand.hpp"

namespace ggs {

namespace {

// Exponential tail beyond this many 1/kappa1 lifetimes is below 1e-11 of the
// click mass; quadratures truncate here when the window is infinite.
constexpr double kTailLifetimes = 60.0;

double window_norm(const EmissionModel& model) {
    if (std::isinf(model.window)) return 1.0;
    return 0.5 * ((1.0 - std::exp(-model.kappa1 * model.window)) +
                  (1.0 - std::exp(-model.kappa2() * model.window)));
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

void validate(const EmissionModel& model) {
    if (!(model.kappa1 > 0.0)) throw std::invalid_argument("emission: kappa1 must be positive");
    if (!(model.rate_ratio >= 1.0)) {
        throw std::invalid_argument("emission: rate_ratio must be >= 1");
    }
    if (!(model.window > 0.0)) throw std::invalid_argument("emission: window must be positive");
    if (!(model.sector_prob > 0.0 && model.sector_prob <= 1.0)) {
        throw std::invalid_argument("emission: sector_prob must lie in (0, 1]");
    }
}

double alpha_of_time(const EmissionModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("alpha_of_time: t must be nonnegative");
    const double k1 = model.kappa1;
    const double k2 = model.kappa2();
    return std::atan(std::sqrt(k1 / k2) * std::exp(-(k1 - k2) * t / 2.0));
}

double crossing_time(const EmissionModel& model) {
    if (model.rate_ratio == 1.0) return 0.0;
    const double k1 = model.kappa1;
    const double k2 = model.kappa2();
    return std::log(k2 / k1) / (k2 - k1);
}

double click_time_pdf(const EmissionModel& model, double t) {
    if (t < 0.0 || t > model.window) return 0.0;
    const double k1 = model.kappa1;
    const double k2 = model.kappa2();
    return 0.5 * (k1 * std::exp(-k1 * t) + k2 * std::exp(-k2 * t)) / window_norm(model);
}

DetectionEvent click_time_sample(const EmissionModel& model, std::mt19937_64& rng) {
    const double k1 = model.kappa1;
    const double k2 = model.kappa2();
    const double m1 = std::isinf(model.window) ? 1.0 : 1.0 - std::exp(-k1 * model.window);
    const double m2 = std::isinf(model.window) ? 1.0 : 1.0 - std::exp(-k2 * model.window);
    const double pick = uniform01(rng) * (m1 + m2);
    const double k = pick < m1 ? k1 : k2;
    const double cap = pick < m1 ? m1 : m2;
    const double u = uniform01(rng);
    DetectionEvent ev;
    ev.t = -std::log1p(-u * cap) / k;  // inverse CDF of the truncated exponential
    ev.alpha = alpha_of_time(model, ev.t);
    ev.detector_tag = (rng() & 1u) != 0 ? 1 : 0;
    return ev;
}

double fidelity_of_alpha(double alpha) {
    require_tilt(alpha, "fidelity_of_alpha");
    return 0.5 * (1.0 + std::sin(2.0 * alpha));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(std::abs(whole), 1e-3) * rel_tol;
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("find_root: endpoints do not bracket");
    // bisection with a secant refinement step
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        const double span = fhi - flo;
        if (std::abs(span) > 1e-300) {
            const double secant = lo - flo * (hi - lo) / span;
            if (secant > lo + 0.1 * (hi - lo) && secant < hi - 0.1 * (hi - lo)) {
                mid = secant;
            }
        }
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

NaiveWindow naive_window_mass(const EmissionModel& model, double epsilon) {
    validate(model);
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("naive_window_mass: epsilon must lie in (0, 1/2)");
    }
    const double threshold = 1.0 - epsilon;
    if (threshold >= 1.0) {
        throw std::invalid_argument("naive_window_mass: epsilon below machine resolution");
    }
    const double t_end = std::isinf(model.window) ? kTailLifetimes / model.kappa1 : model.window;

    NaiveWindow out;
    if (model.rate_ratio == 1.0) {
        // identical cavities: every click is ideal
        out.t_lo = 0.0;
        out.t_hi = model.window;
        out.overall_success = model.sector_prob;
        return out;
    }

    const auto excess = [&](double t) {
        return fidelity_of_alpha(alpha_of_time(model, t)) - threshold;
    };
    const double t_star = crossing_time(model);
    if (excess(t_star) <= 0.0) {
        throw std::invalid_argument("naive_window_mass: empty acceptance window");
    }
    out.t_lo = excess(0.0) >= 0.0 ? 0.0 : find_root(excess, 0.0, t_star);
    if (excess(t_end) >= 0.0) {
        out.t_hi = model.window;  // acceptance extends past the tail cutoff
    } else {
        out.t_hi = find_root(excess, t_star, t_end);
    }

    const double hi = std::min(std::isinf(out.t_hi) ? t_end : out.t_hi, t_end);
    const double mass = adaptive_simpson([&](double t) { return click_time_pdf(model, t); },
                                         out.t_lo, hi, 1e-9);
    out.overall_success = model.sector_prob * mass;
    return out;
}

double adaptive_expected_success(const EmissionModel& model) {
    validate(model);
    const double t_end = std::isinf(model.window) ? kTailLifetimes / model.kappa1 : model.window;
    const double value = adaptive_simpson(
        [&](double t) { return click_time_pdf(model, t) * p_success(alpha_of_time(model, t)); },
        0.0, t_end, 1e-9);
    return model.sector_prob * value;
}

} // namespace ggs
