#pragma once

namespace singul {

/// Γ(a) for a > 0. At least 12 significant digits on a ∈ [0.5, 30].
double gamma_complete(double a);

/// Lower incomplete gamma γ(a, x) = ∫₀ˣ t^{a-1} e^{-t} dt, unnormalized.
double gamma_lower(double a, double x);

/// Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ t^{a-1} e^{-t} dt, unnormalized.
double gamma_upper(double a, double x);

/// Regularized P(a, x) = γ(a, x)/Γ(a) in [0, 1].
double gamma_p(double a, double x);

/// Principal-branch solution w ∈ [-1, 0) of w e^w = -rho, for rho ∈ (0, 1/e].
double lambert_w0(double rho);

/// Lower-branch solution w ≤ -1 of w e^w = -rho, for rho ∈ (0, 1/e].
double lambert_wm1(double rho);

/// Surface area of the unit sphere S^{d-1} in R^d; sphere_area(1) = 2.
double sphere_area(int d);

}  // namespace singul
