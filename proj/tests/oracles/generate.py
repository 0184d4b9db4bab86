"""Independent reference values for the C++ tests.

Run: python3 tests/oracles/generate.py > tests/oracles.hpp
Uses mpmath / scipy only; nothing here calls the C++ code.
"""
import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad, solve_ivp

mp.mp.dps = 30
C_NM_PS = mp.mpf("299792.458")
C_CM_PS = mp.mpf("0.0299792458")
H = mp.mpf("6.62607015e-34")
KB = mp.mpf("1.380649e-23")
C_SI = mp.mpf("299792458")


def stokes_nm(pump_nm, shift):
    return 1 / (1 / (mp.mpf(pump_nm) * mp.mpf("1e-7")) - shift) * mp.mpf("1e7")


def bose(e_cm, t_k):
    x = H * C_SI * 100 * e_cm / (KB * t_k)
    return 1 / mp.expm1(x)


def gaussian_factor(fwhm, period):
    # Fringe contrast after convolving cos(2 pi x / P) with a unit-area Gaussian.
    s = fwhm / (2 * math.sqrt(2 * math.log(2)))
    k = lambda x: math.exp(-x * x / (2 * s * s)) / (s * math.sqrt(2 * math.pi))
    return quad(lambda x: k(x) * math.cos(2 * math.pi * x / period), -12 * s, 12 * s, limit=400)[0]


def pixel_factor(width, period):
    # Box average of cos over one pixel.
    return abs(quad(lambda x: math.cos(2 * math.pi * x / period), -width / 2, width / 2)[0] / width)


def langevin_moments(g, tp, gamma, norm, delay):
    """Exact second moments of the linear c-number system.

    State x = (Re a1, Im a1, Re a2, Im a2, Re b, Im b) with
      da_i = -i g_i conj(b) dt
      db   = (-i g1 conj(a1) - i g2 conj(a2) - gamma b) dt + dW,  E|dW|^2 = 2 gamma norm dt
    and vacuum initial covariance E|a|^2 = 1, E|b|^2 = norm.
    """
    def drift(t):
        g1 = g if t < tp else 0.0
        g2 = g if delay <= t < delay + tp else 0.0
        m = np.zeros((6, 6))
        # -i g conj(b): Re -> -g Im b, Im -> -g Re b
        m[0, 5] = -g1; m[1, 4] = -g1
        m[2, 5] = -g2; m[3, 4] = -g2
        m[4, 1] = -g1; m[5, 0] = -g1
        m[4, 3] = -g2; m[5, 2] = -g2
        m[4, 4] = -gamma; m[5, 5] = -gamma
        return m

    q = np.zeros((6, 6))
    q[4, 4] = q[5, 5] = gamma * norm

    def rhs(t, p):
        p = p.reshape(6, 6)
        m = drift(t)
        return (m @ p + p @ m.T + q).ravel()

    p = np.diag([0.5, 0.5, 0.5, 0.5, norm / 2, norm / 2]).ravel()
    edges = sorted({0.0, tp, delay, delay + tp})
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            p = solve_ivp(rhs, (lo, hi), p, rtol=1e-12, atol=1e-16, max_step=(hi - lo) / 50).y[:, -1]
    p = p.reshape(6, 6)
    corr = complex(p[0, 2] + p[1, 3], p[0, 3] - p[1, 2]) / 2
    n1 = (p[0, 0] + p[1, 1] - 1) / 2
    n2 = (p[2, 2] + p[3, 3] - 1) / 2
    return corr, n1, n2


def emit(name, value, note):
    print(f"inline constexpr double {name} = {float(value)!r};  // {note}")


print("#pragma once")
print()
print("// Generated by tests/oracles/generate.py; do not edit by hand.")
print()
print("namespace oracle {")
print()
lam = stokes_nm(788, 1332)
emit("kStokes788", lam, "nm, 1332 cm^-1 below 788 nm")
emit("kStokes800", stokes_nm(800, 1332), "nm")
emit("kFringe039", lam**2 / (C_NM_PS * mp.mpf("0.39")), "nm, Stokes pair at 0.39 ps")
emit("kFringe051", lam**2 / (C_NM_PS * mp.mpf("0.51")), "nm, Stokes pair at 0.51 ps")
emit("kThermal300", bose(1332, 300), "1332 cm^-1 at 300 K")
emit("kThermal800", bose(1332, 800), "1332 cm^-1 at 800 K")
emit("kThermal77", bose(1332, 77), "1332 cm^-1 at 77 K")
emit("kLinewidth68", (1 / mp.mpf("6.8")) / (mp.pi * C_CM_PS), "cm^-1 FWHM for 1/Gamma = 6.8 ps")
emit("kLinewidth105", (1 / mp.mpf("10.5")) / (mp.pi * C_CM_PS), "cm^-1 FWHM for 1/Gamma = 10.5 ps")
emit("kQ68", mp.mpf(1332) * C_CM_PS * mp.mpf("6.8"), "nu / Gamma with nu in cycles/ps")
emit("kBandwidth80fs", 2 * mp.log(2) / mp.pi / mp.mpf("0.080"), "THz, Gaussian transform limit")
emit("kSincHalf", 2 / mp.pi, "pixel factor at w = P/2")
emit("kGaussFactor", gaussian_factor(0.06, 0.6463), "0.06 nm FWHM, 0.6463 nm fringes")
emit("kGaussFactorWide", gaussian_factor(0.7, 2.0), "0.7 nm FWHM, 2 nm fringes")
emit("kPixelFactor", pixel_factor(0.025, 0.6463), "0.025 nm pixel, 0.6463 nm fringes")
print()
print("// Exact second moments of the linear Langevin system, default parameters")
print("// (g = 0.125 /ps, pump 0.08 ps, Gamma = 1/6.8 /ps, N = 0).")
gamma = 1 / 6.8
for tag, gt in (("0", 0.0), ("1", 1.0), ("2", 2.0)):
    corr, n1, n2 = langevin_moments(0.125, 0.08, gamma, 1.0, gt / gamma)
    emit(f"kCorrRe_GT{tag}", corr.real, f"Gamma tau = {gt}")
    emit(f"kCorrIm_GT{tag}", corr.imag, f"Gamma tau = {gt}")
    emit(f"kN1_GT{tag}", n1, f"Gamma tau = {gt}")
    emit(f"kN2_GT{tag}", n2, f"Gamma tau = {gt}")
corr, n1, n2 = langevin_moments(0.125, 0.08, gamma, 2 * 0.5 + 1.0, 6.8)
emit("kCorrRe_N05", corr.real, "thermal population 0.5, tau = 6.8 ps")
emit("kN1_N05", n1, "thermal population 0.5")
print()
print("}  // namespace oracle")
