#include "causalflow/numeric.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace causalflow::num {

static double read_epsilon_env() {
    const char* env = std::getenv("CAUSALFLOW_EPS");
    if (env == nullptr || *env == '\0') {
        return 1e-12;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec != std::errc{} || ptr != env + std::strlen(env) || value <= 0.0) {
        throw std::invalid_argument("CAUSALFLOW_EPS must be a positive float");
    }
    return value;
}

double epsilon() {
    static const double eps = read_epsilon_env();
    return eps;
}

Maximum golden_max(const std::function<double(double)>& f, double lo,
                   double hi, double x_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

Maximum grid_refine_max(const std::function<double(double)>& f, double lo,
                        double hi, int grid_points, double x_tol) {
    if (grid_points < 3) {
        grid_points = 3;
    }
    double best_x = lo, best_f = f(lo);
    std::vector<double> xs(static_cast<std::size_t>(grid_points));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < grid_points; ++i) {
        xs[static_cast<std::size_t>(i)] =
            std::exp(llo + (lhi - llo) * i / (grid_points - 1));
    }
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double v = f(xs[i]);
        if (v > best_f) {
            best_f = v;
            best_x = xs[i];
            best_i = i;
        }
    }
    double a = best_i == 0 ? xs.front() : xs[best_i - 1];
    double b = best_i + 1 >= xs.size() ? xs.back() : xs[best_i + 1];
    if (a == b) {
        return {best_x, best_f};
    }
    Maximum refined = golden_max(f, a, b, x_tol);
    if (refined.value >= best_f) {
        return refined;
    }
    return {best_x, best_f};
}

}  // namespace causalflow::num
