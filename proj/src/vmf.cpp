#include "spheredepth/vmf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spheredepth::vmf {

namespace {

constexpr double kSeriesCutoff = 100.0;

void check_dim(std::size_t d) {
    if (d < 2) throw std::invalid_argument("vmf: dimension must be >= 2");
}

void check_kappa(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("vmf: kappa must be finite and >= 0, got " + std::to_string(kappa));
    }
}

// log of the reciprocal surface area of S^{d-1}.
double log_uniform_density(std::size_t d) {
    const double half = 0.5 * static_cast<double>(d);
    return std::lgamma(half) - std::numbers::ln2 - half * std::log(std::numbers::pi);
}

}  // namespace

VmfParams::VmfParams(UnitVector mu, double kappa) : mu_(std::move(mu)), kappa_(kappa) {
    check_kappa(kappa_);
}

namespace detail {

double log_bessel_i_series(double nu, double x) {
    // I_nu(x) = sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)), accumulated relative
    // to the k = 0 term with periodic rescaling.
    const double q = 0.25 * x * x;
    double log_scale = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    double term = 1.0;
    double sum = 1.0;
    constexpr double kRescale = 1e200;
    for (int k = 0; k < 1000000; ++k) {
        const double kk = static_cast<double>(k);
        const double ratio = q / ((kk + 1.0) * (kk + 1.0 + nu));
        term *= ratio;
        sum += term;
        if (sum > kRescale) {
            term /= kRescale;
            sum /= kRescale;
            log_scale += std::log(kRescale);
        }
        if (ratio < 1.0 && term < sum * 1e-17) break;
    }
    return log_scale + std::log(sum);
}

double log_bessel_i_debye(double nu, double x) {
    // I_nu(nu z) ~ exp(nu eta) / (sqrt(2 pi nu) (1+z^2)^{1/4}) sum_k u_k(t) / nu^k,
    // rewritten with s = sqrt(nu^2 + x^2) and t = nu / s so that nu = 0 is
    // admissible: u_k(t) / nu^k = poly_k(t^2) / s^k.
    const double s = std::hypot(nu, x);
    const double t = nu / s;
    const double t2 = t * t;
    const double inv = 1.0 / s;
    const double p1 = (3.0 - 5.0 * t2) / 24.0;
    const double p2 = (81.0 - 462.0 * t2 + 385.0 * t2 * t2) / 1152.0;
    const double p3 = (30375.0 - 369603.0 * t2 + 765765.0 * t2 * t2 - 425425.0 * t2 * t2 * t2) / 414720.0;
    const double p4 = (4465125.0 - 94121676.0 * t2 + 349922430.0 * t2 * t2 - 446185740.0 * t2 * t2 * t2 +
                       185910725.0 * t2 * t2 * t2 * t2) /
                      39813120.0;
    const double series = 1.0 + inv * (p1 + inv * (p2 + inv * (p3 + inv * p4)));
    const double nu_eta = s + (nu > 0.0 ? nu * std::log(x / (nu + s)) : 0.0);
    return nu_eta - 0.5 * std::log(2.0 * std::numbers::pi * s) + std::log(series);
}

}  // namespace detail

double log_bessel_i(double nu, double x) {
    if (!(nu >= 0.0)) throw std::invalid_argument("log_bessel_i: order must be >= 0");
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("log_bessel_i: argument must be finite and > 0");
    if (x <= kSeriesCutoff + nu) return detail::log_bessel_i_series(nu, x);
    return detail::log_bessel_i_debye(nu, x);
}

double log_normalizing_constant(double kappa, std::size_t d) {
    check_kappa(kappa);
    check_dim(d);
    if (kappa == 0.0) return log_uniform_density(d);
    const double nu = 0.5 * static_cast<double>(d) - 1.0;
    return nu * std::log(kappa) - 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
           log_bessel_i(nu, kappa);
}

double log_density(const UnitVector& x, const VmfParams& p) {
    if (x.dim() != p.dim()) throw DimensionMismatch(x.dim(), p.dim());
    return log_normalizing_constant(p.kappa(), p.dim()) + p.kappa() * clamp_cosine(dot(p.mu(), x));
}

double expected_resultant_length(double kappa, std::size_t d) {
    check_kappa(kappa);
    check_dim(d);
    if (kappa == 0.0) return 0.0;
    const double half = 0.5 * static_cast<double>(d);
    return std::exp(log_bessel_i(half, kappa) - log_bessel_i(half - 1.0, kappa));
}

UnitVector draw_uniform(std::size_t d, Rng& rng) {
    check_dim(d);
    for (;;) {
        const auto v = standard_normal_vector(rng, d);
        double sq = 0.0;
        for (double c : v) sq += c * c;
        if (sq > 1e-300) return normalize(v);
    }
}

UnitVector draw(const VmfParams& p, Rng& rng) {
    const std::size_t d = p.dim();
    const double kappa = p.kappa();
    if (kappa == 0.0) return draw_uniform(d, rng);

    // Cosine component w = mu'x by Wood's rejection scheme. The envelope
    // parameter b is written in the cancellation-free form.
    const double m = static_cast<double>(d - 1);
    const double b = m / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m * m));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + m * std::log(1.0 - x0 * x0);
    std::gamma_distribution<double> gamma(0.5 * m, 1.0);
    double w = 0.0;
    for (;;) {
        const double ga = gamma(rng);
        const double gb = gamma(rng);
        const double z = ga / (ga + gb);
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        const double u = uniform01(rng);
        if (u > 0.0 && kappa * w + m * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }
    w = std::clamp(w, -1.0, 1.0);

    // Uniform tangent direction orthogonal to mu.
    const auto mu = p.mu().coords();
    std::vector<double> v;
    double vnorm = 0.0;
    do {
        v = standard_normal_vector(rng, d);
        double proj = 0.0;
        for (std::size_t i = 0; i < d; ++i) proj += v[i] * mu[i];
        vnorm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            v[i] -= proj * mu[i];
            vnorm += v[i] * v[i];
        }
        vnorm = std::sqrt(vnorm);
    } while (!(vnorm > 1e-12));

    const double r = std::sqrt(std::max(0.0, 1.0 - w * w));
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = w * mu[i] + r * v[i] / vnorm;
    return normalize(x);
}

std::vector<UnitVector> sample(const VmfParams& p, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("vmf::sample: n must be >= 1");
    Rng rng(seed);
    std::vector<UnitVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw(p, rng));
    return out;
}

std::vector<UnitVector> sample_uniform(std::size_t d, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("vmf::sample_uniform: n must be >= 1");
    Rng rng(seed);
    std::vector<UnitVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw_uniform(d, rng));
    return out;
}

}  // namespace spheredepth::vmf
