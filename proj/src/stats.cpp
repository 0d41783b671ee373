#include "ssgl/stats.hpp"

#include <cmath>

#include "ssgl/errors.hpp"

namespace ssgl {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("normal_quantile: p must lie in (0,1)");
    }
    // AS 241 algorithm PPND16
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

namespace {

double chi2_3_cdf(double x) {
    if (x <= 0.0) return 0.0;
    const double s = std::sqrt(x);
    return 2.0 * normal_cdf(s) - 1.0 -
           std::sqrt(2.0 * x / 3.141592653589793238462643383280) * std::exp(-0.5 * x);
}

double chi2_3_pdf(double x) {
    // x^{1/2} e^{-x/2} / (sqrt(2 pi))  since Gamma(3/2) 2^{3/2} = sqrt(2 pi)
    return std::sqrt(x) * std::exp(-0.5 * x) / 2.5066282746310005024157652848110;
}

} // namespace

double chi2_3_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("chi2_3_quantile: p must lie in (0,1)");
    }
    // Wilson-Hilferty start, then Newton
    const double z = normal_quantile(p);
    const double c = 1.0 - 2.0 / 27.0 + z * std::sqrt(2.0 / 27.0);
    double x = 3.0 * c * c * c;
    if (x <= 0.0) x = 1e-8;
    for (int it = 0; it < 60; ++it) {
        const double f = chi2_3_cdf(x) - p;
        const double d = chi2_3_pdf(x);
        if (d <= 0.0) break;
        double step = f / d;
        if (x - step <= 0.0) step = x / 2.0;
        x -= step;
        if (std::abs(step) < 1e-14 * (1.0 + x)) break;
    }
    return x;
}

double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

} // namespace ssgl
