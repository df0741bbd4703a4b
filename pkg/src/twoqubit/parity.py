"""Checks of the blue/red operator parity behind the sign ambiguity.

Blue operators are ``S_j``, ``S_j X_2``, ``S_j X_3``, ``X_1`` (and the identity);
red operators are ``S_j X_1``, ``X_2``, ``X_3``.  Commutators respect the
colouring like a Z2 grading, and the Hamiltonian parameters attached to red
operators are exactly ``gamma_1``, ``beta_2``, ``beta_3``.  Hence flipping
those three signs leaves blue coefficients of ``S_n(t)`` unchanged and negates
red ones.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable

import numpy as np

from . import pauli
from .dynamics import taylor_maps
from .hamiltonian import CanonicalHamiltonian, sign_partner, spectrum


class OperatorColor(str, Enum):
    BLUE = "blue"
    RED = "red"


class ColorAlgebraError(AssertionError):
    pass


def color_of(e: tuple[int, int]) -> OperatorColor:
    s, x = e
    pauli.index(s, x)
    if (s == 0 and x in (2, 3)) or (s > 0 and x == 1):
        return OperatorColor.RED
    return OperatorColor.BLUE


def _expected(a: OperatorColor, b: OperatorColor) -> OperatorColor:
    return OperatorColor.BLUE if a == b else OperatorColor.RED


def check_color_algebra() -> dict:
    """Exhaustive sweep over pairs of the 15 non-identity basis elements."""
    table = pauli.product_table()
    checked = nonzero = 0
    for i in range(1, 16):
        for j in range(1, 16):
            checked += 1
            entry = table[i, j]
            if entry is None:
                continue
            nonzero += 1
            ei, ej, ek = pauli.element(i), pauli.element(j), pauli.element(entry[1])
            want = _expected(color_of(ei), color_of(ej))
            if color_of(ek) is not want:
                raise ColorAlgebraError(
                    f"[{pauli.label(ei)}, {pauli.label(ej)}] ~ {pauli.label(ek)} is {color_of(ek).value}, "
                    f"expected {want.value}"
                )
    return {"check": "color_algebra", "passed": True, "pairs": checked, "nonzero_commutators": nonzero}


_V_SIGN = np.array([1.0, -1.0, -1.0])
_W_SIGN = np.array([-1.0, 1.0, 1.0])


def verify_parity_series(
    h: CanonicalHamiltonian,
    order: int = 6,
    tol: float = 1e-12,
    partner: Callable[[CanonicalHamiltonian], CanonicalHamiltonian] = sign_partner,
) -> dict:
    """Compare Taylor tables of ``h`` and its partner against the parity pattern.

    Deviations are measured per order relative to ``max(1, scale)**m``.
    """
    if order > 6:
        raise ValueError("parity series checked up to order 6")
    a = taylor_maps(h, order)
    b = taylor_maps(partner(h), order)
    scale = max(1.0, float(np.abs(h.parameters()).max()))
    norm = scale ** np.arange(order + 1, dtype=float)

    def worst(x, y):
        return float(np.max(np.abs(x - y).reshape(order + 1, -1).max(axis=1) / norm))

    dev = {
        "u_invariant": worst(a.u, b.u),
        "v_pattern": worst(a.v * _V_SIGN, b.v),
        "w_pattern": worst(a.w * _W_SIGN, b.w),
    }
    return {
        "check": "parity_series",
        "order": order,
        "max_deviation": dev,
        "passed": all(d <= tol for d in dev.values()),
    }


def verify_spectrum_gap(h: CanonicalHamiltonian) -> float:
    """Largest difference between the sorted spectra of ``h`` and its partner.

    Only defined for ``alpha = beta = 0``.
    """
    if np.any(h.alpha != 0) or np.any(h.beta != 0):
        raise ValueError("spectrum-gap check requires alpha = beta = 0")
    return float(np.max(np.abs(spectrum(h) - spectrum(sign_partner(h)))))
