#pragma once

namespace oscbo {

double normal_pdf(double z);
double normal_logpdf(double z);
/// Φ(z) via erfc; accurate to ~1e-15 absolute.
double normal_cdf(double z);
/// Φ⁻¹(p). Acklam's rational approximation plus one Halley refinement step.
/// Throws InvalidArgument unless 0 < p < 1.
double normal_quantile(double p);

}  // namespace oscbo
