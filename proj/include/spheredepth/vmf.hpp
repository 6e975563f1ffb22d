#pragma once

#include "spheredepth/random.hpp"
#include "spheredepth/sphere.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spheredepth::vmf {

/// Mean direction and concentration of a von Mises-Fisher law on S^{d-1};
/// d is the dimension of mu.
class VmfParams {
public:
    VmfParams(UnitVector mu, double kappa);

    const UnitVector& mu() const noexcept { return mu_; }
    double kappa() const noexcept { return kappa_; }
    std::size_t dim() const noexcept { return mu_.dim(); }

private:
    UnitVector mu_;
    double kappa_;
};

/// log I_nu(x) for nu >= 0, x > 0, without overflow. Power series for
/// x <= 100 + nu, Debye uniform asymptotic expansion beyond.
double log_bessel_i(double nu, double x);

namespace detail {
double log_bessel_i_series(double nu, double x);
double log_bessel_i_debye(double nu, double x);
}  // namespace detail

/// log c_d(kappa) with c_d(kappa) = kappa^{d/2-1} / ((2 pi)^{d/2} I_{d/2-1}(kappa)).
/// At kappa = 0 this is minus the log surface area of S^{d-1}.
double log_normalizing_constant(double kappa, std::size_t d);

/// log c_d(kappa) + kappa mu'x.
double log_density(const UnitVector& x, const VmfParams& p);

/// A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa), the expected mean
/// resultant length.
double expected_resultant_length(double kappa, std::size_t d);

/// One draw from vMF(mu, kappa) using the caller's stream.
UnitVector draw(const VmfParams& p, Rng& rng);

/// Uniform point on S^{d-1}: a normalized standard normal vector.
UnitVector draw_uniform(std::size_t d, Rng& rng);

/// n i.i.d. draws, deterministic per seed. kappa = 0 reduces to uniform.
std::vector<UnitVector> sample(const VmfParams& p, std::size_t n, std::uint64_t seed);

std::vector<UnitVector> sample_uniform(std::size_t d, std::size_t n, std::uint64_t seed);

}  // namespace spheredepth::vmf
