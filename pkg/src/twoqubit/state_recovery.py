"""Recovery of the unobserved-qubit and correlation mean values.

Once a candidate Hamiltonian is fixed, the part of each Taylor coefficient of
``<S_n(t)>`` not explained by ``u <S>`` is linear in the twelve unknowns
``<X_k>`` and ``<S_j X_k>``.  The system is solved by SVD; coordinates with a
component in the numerical null space are reported as undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import TwoQubitState, taylor_maps
from .errors import InconsistentDataError
from .hamiltonian import CanonicalHamiltonian, Hamiltonian, parameter_scale

RANK_TOL = 1e-8
DEFAULT_ORDER = 4


@dataclass(eq=False)
class EnvironmentEstimate:
    xi: np.ndarray
    corr: np.ndarray
    xi_determined: np.ndarray
    corr_determined: np.ndarray
    residual: float
    rank: int

    def determined_labels(self) -> set[str]:
        labels = {f"X{k + 1}" for k in range(3) if self.xi_determined[k]}
        labels |= {f"S{j + 1}X{k + 1}" for j in range(3) for k in range(3) if self.corr_determined[j, k]}
        return labels

    def to_dict(self) -> dict:
        xi = [float(x) if d else None for x, d in zip(self.xi, self.xi_determined)]
        corr = [
            [float(x) if d else None for x, d in zip(row, drow)]
            for row, drow in zip(self.corr, self.corr_determined)
        ]
        return {"xi": xi, "corr": corr, "rank": int(self.rank), "residual": float(self.residual)}


def environment_part(h: Hamiltonian, state: TwoQubitState, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Taylor coefficients of ``v <X> + w <S X>``; shape ``(order+1, 3)``."""
    tab = taylor_maps(h, order)
    return tab.v @ state.xi + np.einsum("mnjk,jk->mn", tab.w, state.corr)


def subtract_sigma_part(mean_coeffs: np.ndarray, u_blocks: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Remove ``u^(m) <S>`` from the Taylor coefficients of the observed means."""
    k = min(len(mean_coeffs), len(u_blocks))
    return np.asarray(mean_coeffs)[:k] - np.asarray(u_blocks)[:k] @ np.asarray(sigma)


def recover_environment(
    h: CanonicalHamiltonian | Hamiltonian,
    observed: np.ndarray,
    rank_tol: float = RANK_TOL,
    residual_tol: float = 1e-6,
) -> EnvironmentEstimate:
    """Solve for ``<X_k>``, ``<S_j X_k>`` given candidate ``h`` and environment data.

    ``observed[m, n]`` is the m-th Taylor coefficient of the part of
    ``<S_n(t)>`` not attributable to ``u``.  Rows of order ``m`` are divided by
    ``scale**m`` so all orders weigh comparably in the SVD.
    """
    observed = np.asarray(observed, dtype=float)
    order = observed.shape[0] - 1
    if order < 1:
        raise ValueError("need at least first-order data")
    tab = taylor_maps(h, order)
    scale = max(1.0, parameter_scale(h))
    weights = scale ** -np.arange(order + 1, dtype=float)

    a = np.concatenate([tab.v, tab.w.reshape(order + 1, 3, 9)], axis=2)
    a = (a * weights[:, None, None]).reshape(-1, 12)
    b = (observed * weights[:, None]).reshape(-1)

    uu, s, vt = np.linalg.svd(a)
    smax = s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
    x = vt[:rank].T @ ((uu[:, :rank].T @ b) / s[:rank])
    resid = float(np.linalg.norm(a @ x - b))
    if resid > residual_tol * max(1.0, float(np.linalg.norm(b))):
        raise InconsistentDataError(f"environment data inconsistent with candidate (residual {resid:.3e})")

    null = vt[rank:]
    leak = np.linalg.norm(null, axis=0) if null.size else np.zeros(12)
    determined = leak < 1e-6
    x = np.where(determined, x, 0.0)
    return EnvironmentEstimate(
        xi=x[:3],
        corr=x[3:].reshape(3, 3),
        xi_determined=determined[:3],
        corr_determined=determined[3:].reshape(3, 3),
        residual=resid,
        rank=rank,
    )


def flip_environment(est: EnvironmentEstimate) -> EnvironmentEstimate:
    """Negate ``<S_j X_1>``, ``<X_2>``, ``<X_3>``: the estimate under the partner Hamiltonian."""
    xi = est.xi * np.array([1.0, -1.0, -1.0])
    corr = est.corr * np.array([-1.0, 1.0, 1.0])
    return EnvironmentEstimate(
        xi, corr, est.xi_determined.copy(), est.corr_determined.copy(), est.residual, est.rank
    )


def flip_state(state: TwoQubitState) -> TwoQubitState:
    """Same sign change applied to a full set of mean values (may leave the state space)."""
    return TwoQubitState(
        state.sigma.copy(), state.xi * np.array([1.0, -1.0, -1.0]), state.corr * np.array([-1.0, 1.0, 1.0])
    )
