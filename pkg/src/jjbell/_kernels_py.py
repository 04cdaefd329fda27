"""Numpy implementations of the hot kernels (fallback when the extension is absent)."""
import numpy as np


def rotate_pairs(amps, u1, u2):
    """out[m] = (u1[m] (x) u2[m]) @ amps[m] for stacked two-qubit amplitude rows."""
    psi = amps.reshape(-1, 2, 2)
    return np.einsum("mab,mcd,mbd->mac", u1, u2, psi).reshape(-1, 4)


def rotated_probs(amps, u1, u2):
    out = rotate_pairs(amps, u1, u2)
    return out.real**2 + out.imag**2


def draw_outcomes(cdf, uniforms):
    """Inverse-CDF draw of four-outcome codes 0..3 from uniforms in [0, 1)."""
    codes = np.searchsorted(cdf[:3], uniforms, side="right")
    return codes.astype(np.uint8)
