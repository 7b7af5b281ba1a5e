#pragma once

namespace ladderent::tol {

// Centralized numerical tolerances. Keep these in one place so tests and
// library code agree on what "equal" means.
inline constexpr double kHermiticity = 1e-12;   // Hermiticity defect of reduced states
inline constexpr double kSpectrum = 1e-10;      // eigenvalue sum / positivity slack
inline constexpr double kGgmTie = 1e-9;         // bipartitions within this of the max count as ties
inline constexpr double kLanczosRitz = 1e-10;   // default Ritz-value convergence threshold
inline constexpr double kResidualFactor = 1e-8; // residual bound: |Hx - Ex| <= factor * |H|_est
inline constexpr double kDegeneracyGap = 1e-6;  // relative Ritz gap that triggers a degeneracy warning
inline constexpr double kOracle = 1e-9;         // recursion-vs-enumeration and oracle agreement
inline constexpr double kGammaResidual = 1e-10; // least-squares residual for edge-basis expansions

}  // namespace ladderent::tol
