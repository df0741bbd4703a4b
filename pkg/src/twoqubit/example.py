"""Closed forms for the pure-interaction Hamiltonian ``alpha = beta = 0``.

With ``H = 1/2 sum_k g_k S_k X_k`` the three products ``S_k X_k`` commute, and
each ``<S_n(t)>`` is a sum of four terms built from ``cos`` and ``sin`` of the
two couplings other than ``g_n``.
"""

from __future__ import annotations

import numpy as np

from .dynamics import TwoQubitState


def closed_form_sigma(gammas, state: TwoQubitState, t: float) -> np.ndarray:
    g = np.asarray(gammas, dtype=float)
    out = np.empty(3)
    for n in range(3):
        # (n, a, b) cyclic
        a, b = (n + 1) % 3, (n + 2) % 3
        ca, sa = np.cos(g[a] * t), np.sin(g[a] * t)
        cb, sb = np.cos(g[b] * t), np.sin(g[b] * t)
        out[n] = (
            state.sigma[n] * ca * cb
            + state.xi[n] * sa * sb
            - state.corr[a, b] * ca * sb
            + state.corr[b, a] * sa * cb
        )
    return out


def closed_form_trajectory(gammas, state: TwoQubitState, times) -> np.ndarray:
    return np.array([closed_form_sigma(gammas, state, t) for t in times])


def example_eigenvalues(gammas) -> np.ndarray:
    g1, g2, g3 = np.asarray(gammas, dtype=float)
    return np.sort(
        0.5
        * np.array(
            [
                -g1 + g2 + g3,
                g1 + g2 - g3,
                g1 - g2 + g3,
                -g1 - g2 - g3,
            ]
        )
    )
