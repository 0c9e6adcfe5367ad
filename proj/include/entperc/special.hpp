#pragma once

namespace entperc {

// Exponentially scaled modified Bessel function exp(-|z|) I0(z).
// Power series below |z| = 15, Hankel asymptotic expansion above; relative
// error below 1e-13 on both branches.
double bessel_i0_scaled(double z) noexcept;

// I0(z) itself; overflows to +inf beyond z ~ 713.
double bessel_i0(double z) noexcept;

}  // namespace entperc
