#pragma once

// Generated by tests/oracles/generate.py; do not edit by hand.

namespace oracle {

inline constexpr double kStokes788 = 880.4091533949828;  // nm, 1332 cm^-1 below 788 nm
inline constexpr double kStokes800 = 895.4154727793697;  // nm
inline constexpr double kFringe039 = 6.62954599986045;  // nm, Stokes pair at 0.39 ps
inline constexpr double kFringe051 = 5.069652823422697;  // nm, Stokes pair at 0.51 ps
inline constexpr double kThermal300 = 0.001684162974302529;  // 1332 cm^-1 at 300 K
inline constexpr double kThermal800 = 0.10025685413172115;  // 1332 cm^-1 at 800 K
inline constexpr double kThermal77 = 1.5518760960137017e-11;  // 1332 cm^-1 at 77 K
inline constexpr double kLinewidth68 = 1.5614227820223956;  // cm^-1 FWHM for 1/Gamma = 6.8 ps
inline constexpr double kLinewidth105 = 1.0112071350240275;  // cm^-1 FWHM for 1/Gamma = 10.5 ps
inline constexpr double kQ68 = 271.54001675808;  // nu / Gamma with nu in cycles/ps
inline constexpr double kBandwidth80fs = 5.51589000381629;  // THz, Gaussian transform limit
inline constexpr double kSincHalf = 0.6366197723675814;  // pixel factor at w = P/2
inline constexpr double kGaussFactor = 0.9697863257830801;  // 0.06 nm FWHM, 0.6463 nm fringes
inline constexpr double kGaussFactorWide = 0.6465762479816665;  // 0.7 nm FWHM, 2 nm fringes
inline constexpr double kPixelFactor = 0.9975405413836433;  // 0.025 nm pixel, 0.6463 nm fringes

// Exact second moments of the linear Langevin system, default parameters
// (g = 0.125 /ps, pump 0.08 ps, Gamma = 1/6.8 /ps, N = 0).
inline constexpr double kCorrRe_GT0 = 9.961561382819089e-05;  // Gamma tau = 0.0
inline constexpr double kCorrIm_GT0 = 0.0;  // Gamma tau = 0.0
inline constexpr double kN1_GT0 = 9.961561382842987e-05;  // Gamma tau = 0.0
inline constexpr double kN2_GT0 = 9.961561382842987e-05;  // Gamma tau = 0.0
inline constexpr double kCorrRe_GT1 = 3.679142702667094e-05;  // Gamma tau = 1.0
inline constexpr double kCorrIm_GT1 = 0.0;  // Gamma tau = 1.0
inline constexpr double kN1_GT1 = 9.961230378530139e-05;  // Gamma tau = 1.0
inline constexpr double kN2_GT1 = 9.961365725896787e-05;  // Gamma tau = 1.0
inline constexpr double kCorrRe_GT2 = 1.3534809614525621e-05;  // Gamma tau = 2.0
inline constexpr double kCorrIm_GT2 = 0.0;  // Gamma tau = 2.0
inline constexpr double kN1_GT2 = 9.961230378530139e-05;  // Gamma tau = 2.0
inline constexpr double kN2_GT2 = 9.961248695800062e-05;  // Gamma tau = 2.0
inline constexpr double kCorrRe_N05 = 5.5187140539234606e-05;  // thermal population 0.5, tau = 6.8 ps
inline constexpr double kN1_N05 = 0.00014941845567728596;  // thermal population 0.5

}  // namespace oracle
