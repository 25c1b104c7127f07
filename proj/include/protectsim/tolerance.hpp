#pragma once

namespace protectsim {

struct ToleranceConfig {
  double unitarity = 1e-12;          // |norm - 1| after a unitary step
  double hermiticity = 1e-12;        // max |M - M^H| relative to max(1, max|M|)
  double imaginary_residue = 1e-10;  // allowed Im<psi|A|psi>
  double density_trace = 1e-10;
  double density_negativity = 1e-10;  // eigenvalues >= -this
  double eigen_residual = 1e-10;      // |H v - l v| relative to ||H||
  double spectral_reconstruction = 1e-9;
  double product_purity = 1e-10;
  double eigenstate = 1e-8;           // scenario system state vs H_S eigenvector
  double trajectory_norm = 1e-10;
  double norm_blowup = 1e-8;          // propagate aborts past this drift
  double gap_relative = 1e-8;         // degeneracy gap, times spectral range
  double matrix_element = 1e-10;      // "diagonal in the degenerate subspace"
  double truncation_population = 1e-8;
};

inline const ToleranceConfig& default_tolerances() {
  static const ToleranceConfig tol{};
  return tol;
}

}  // namespace protectsim
