"""Forward problem: reduced dynamics of the observed qubit.

For ``n = 1, 2, 3`` the Heisenberg-evolved ``S_n(t)`` is expanded as

    <S_n(t)> = u_nj(t) <S_j> + v_nk(t) <X_k> + w_njk(t) <S_j X_k>

Two independent routes compute the map coefficients: an eigendecomposition of
the 4x4 Hamiltonian (the oracle) and the exponential of the 16x16 adjoint
generator.  Taylor coefficients at ``t = 0`` come from repeated application of
the adjoint generator, never from finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import pauli
from .errors import IllConditionedFitError, InvalidStateError
from .hamiltonian import Hamiltonian, parameter_scale, to_matrix

_U_IDX = [pauli.index(j, 0) for j in range(1, 4)]
_V_IDX = [pauli.index(0, k) for k in range(1, 4)]
_W_IDX = [pauli.index(j, k) for j in range(1, 4) for k in range(1, 4)]


@dataclass(eq=False)
class TwoQubitState:
    """The 15 mean values ``<S_j>``, ``<X_k>``, ``<S_j X_k>``."""

    sigma: np.ndarray = field(default_factory=lambda: np.zeros(3))
    xi: np.ndarray = field(default_factory=lambda: np.zeros(3))
    corr: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float).reshape(3)
        self.xi = np.asarray(self.xi, dtype=float).reshape(3)
        self.corr = np.asarray(self.corr, dtype=float).reshape(3, 3)

    def coefficients(self) -> np.ndarray:
        c = np.zeros(16)
        c[0] = 1.0
        c[_U_IDX] = self.sigma
        c[_V_IDX] = self.xi
        c[_W_IDX] = self.corr.ravel()
        return c

    def density_matrix(self) -> np.ndarray:
        return pauli.from_coefficients(self.coefficients()) / 4.0

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.density_matrix())[0])

    def is_valid(self, tol: float = 1e-12) -> bool:
        return self.min_eigenvalue() >= -tol

    @classmethod
    def from_density(cls, rho: np.ndarray) -> TwoQubitState:
        c = pauli.pauli_expand(rho) * 4.0
        return cls(c[_U_IDX], c[_V_IDX], c[_W_IDX].reshape(3, 3))

    @classmethod
    def random_pure(cls, rng: np.random.Generator) -> TwoQubitState:
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        return cls.from_density(np.outer(psi, psi.conj()))

    def transformed(self, r: np.ndarray, s: np.ndarray) -> TwoQubitState:
        """Mean values after the frame change ``S -> R S``, ``X -> S X``."""
        return TwoQubitState(r @ self.sigma, s @ self.xi, r @ self.corr @ s.T)


@dataclass(eq=False)
class MapSnapshot:
    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


@dataclass(eq=False)
class TaylorTable:
    """Taylor coefficients (derivative / m!) of the maps at ``t = 0``.

    ``u`` has shape ``(K+1, 3, 3)``, ``v`` likewise and ``w`` ``(K+1, 3, 3, 3)``;
    index 0 is the order.  ``residuals`` is filled in by :func:`fit_taylor`.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    residuals: np.ndarray | None = None

    @property
    def order(self) -> int:
        return self.u.shape[0] - 1

    def coefficient(self, m: int) -> MapSnapshot:
        return MapSnapshot(float("nan"), self.u[m], self.v[m], self.w[m])

    def truncated(self, order: int) -> TaylorTable:
        if order > self.order:
            raise ValueError(f"table only has order {self.order}")
        res = None if self.residuals is None else self.residuals[: order + 1]
        return TaylorTable(self.u[: order + 1], self.v[: order + 1], self.w[: order + 1], res)

    def rotated(self, r: np.ndarray) -> TaylorTable:
        """Re-express the table in the observed-qubit frame ``S -> R S``."""
        u = np.einsum("na,mab,jb->mnj", r, self.u, r)
        v = np.einsum("na,mak->mnk", r, self.v)
        w = np.einsum("na,jb,mabk->mnjk", r, r, self.w)
        return TaylorTable(u, v, w, self.residuals)

    def evaluate(self, t: float) -> MapSnapshot:
        powers = t ** np.arange(self.order + 1)
        return MapSnapshot(
            t,
            np.tensordot(powers, self.u, axes=1),
            np.tensordot(powers, self.v, axes=1),
            np.tensordot(powers, self.w, axes=1),
        )


def _split_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort coefficient vectors (one per ``n``) into u, v, w blocks."""
    return rows[..., _U_IDX], rows[..., _V_IDX], rows[..., _W_IDX].reshape(rows.shape[:-1] + (3, 3))


def _unit(e: tuple[int, int]) -> np.ndarray:
    c = np.zeros(16)
    c[pauli.index(*e)] = 1.0
    return c


def adjoint_generator(h: Hamiltonian) -> np.ndarray:
    return pauli.adjoint_matrix(to_matrix(h))


def evolve_heisenberg_exact(h: Hamiltonian, e: tuple[int, int], t: float) -> np.ndarray:
    """Coefficients of ``exp(itH) B_e exp(-itH)`` via the Hermitian eigendecomposition."""
    energies, vecs = np.linalg.eigh(to_matrix(h))
    u = (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T
    op = u.conj().T @ pauli.basis_matrix(e) @ u
    return pauli.pauli_expand(0.5 * (op + op.conj().T))


def evolve_heisenberg_adjoint(h: Hamiltonian, e: tuple[int, int], t: float) -> np.ndarray:
    """Same quantity as :func:`evolve_heisenberg_exact` via ``expm(t A)``."""
    return scipy.linalg.expm(t * adjoint_generator(h)) @ _unit(e)


def map_snapshot(h: Hamiltonian, t: float, method: str = "eigen") -> MapSnapshot:
    if method == "eigen":
        energies, vecs = np.linalg.eigh(to_matrix(h))
        u = (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T
        rows = []
        for n in range(1, 4):
            op = u.conj().T @ pauli.basis_matrix((n, 0)) @ u
            rows.append(pauli.pauli_expand(0.5 * (op + op.conj().T)))
        rows = np.array(rows)
    elif method == "adjoint":
        prop = scipy.linalg.expm(t * adjoint_generator(h))
        rows = prop[:, _U_IDX].T
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.max(np.abs(rows[:, 0])) > 1e-10:
        raise AssertionError("identity component appeared in a traceless evolution")
    u, v, w = _split_rows(rows)
    return MapSnapshot(float(t), u, v, w)


def taylor_maps(h: Hamiltonian, order: int) -> TaylorTable:
    """Exact Taylor coefficients through ``order`` by nested commutators."""
    if order < 0:
        raise ValueError("order must be non-negative")
    a = adjoint_generator(h)
    cur = np.eye(16)[:, _U_IDX]
    blocks = [cur.T.copy()]
    for m in range(1, order + 1):
        cur = a @ cur / m
        blocks.append(cur.T.copy())
    u, v, w = _split_rows(np.array(blocks))
    return TaylorTable(u, v, w)


def mean_trajectory(
    h: Hamiltonian, state: TwoQubitState, times, allow_invalid: bool = False, method: str = "eigen"
) -> np.ndarray:
    """``<S_n(t)>`` for each time; shape ``(len(times), 3)``."""
    if not allow_invalid and not state.is_valid():
        raise InvalidStateError(
            f"state has negative eigenvalue {state.min_eigenvalue():.3e}; pass allow_invalid=True to override"
        )
    out = []
    for t in times:
        snap = map_snapshot(h, t, method)
        out.append(snap.u @ state.sigma + snap.v @ state.xi + np.einsum("njk,jk->n", snap.w, state.corr))
    return np.array(out)


def mean_taylor(h: Hamiltonian, state: TwoQubitState, order: int) -> np.ndarray:
    """Taylor coefficients of ``<S_n(t)>``; shape ``(order+1, 3)``."""
    tab = taylor_maps(h, order)
    return (
        tab.u @ state.sigma + tab.v @ state.xi + np.einsum("mnjk,jk->mn", tab.w, state.corr)
    )


def density_trajectory(h: Hamiltonian, state: TwoQubitState, times) -> np.ndarray:
    """Oracle: ``trace(rho(t) S_n)`` from Schroedinger-picture evolution."""
    hm = to_matrix(h)
    rho0 = state.density_matrix()
    out = []
    for t in times:
        u = scipy.linalg.expm(-1j * t * hm)
        rho = u @ rho0 @ u.conj().T
        out.append([np.trace(rho @ pauli.basis_matrix((n, 0))).real for n in range(1, 4)])
    return np.array(out)


def default_window(h: Hamiltonian) -> float:
    return 0.2 / max(parameter_scale(h), 1e-12)


def fit_polynomial(
    times,
    values,
    order: int,
    window: float | None = None,
    degree: int | None = None,
    max_condition: float = 1e12,
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares Taylor coefficients of sampled columns near ``t = 0``.

    Samples with ``0 <= t <= window`` are used.  The polynomial degree defaults
    to ``order + 1`` (one guard term absorbing the leading truncation error).
    Time is rescaled to ``t / window`` before fitting and the conditioning
    check applies to that scaled design matrix.  Returns the coefficients of
    orders ``0..order`` (shape ``(order+1, ncols)``) and per-column RMS residuals.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is None:
        window = float(times.max())
    keep = (times >= 0) & (times <= window * (1 + 1e-12))
    times, values = times[keep], values[keep]
    deg = order + 1 if degree is None else degree
    if deg < order:
        raise ValueError("degree must be at least the requested order")
    if len(times) < 2 * (order + 1):
        raise ValueError(f"need at least {2 * (order + 1)} samples in [0, {window}], got {len(times)}")
    if len(np.unique(times)) != len(times):
        raise ValueError("sample times must be distinct")

    design = np.vander(times / window, deg + 1, increasing=True)
    cond = np.linalg.cond(design)
    if cond > max_condition:
        raise IllConditionedFitError(
            f"design matrix condition number {cond:.2e} exceeds {max_condition:.0e}; "
            "use a smaller window or fewer orders"
        )
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = np.sqrt(np.mean((design @ coef - values) ** 2, axis=0))
    coef = coef[: order + 1] / (window ** np.arange(order + 1))[:, None]
    return coef, resid


def fit_taylor(
    samples: list[tuple[float, MapSnapshot]] | list[MapSnapshot],
    order: int,
    window: float | None = None,
    degree: int | None = None,
    max_condition: float = 1e12,
) -> TaylorTable:
    """Taylor table estimated from sampled map snapshots (see :func:`fit_polynomial`).

    Residuals are stored with the u, v, w entries flattened in that order.
    """
    snaps = [s if isinstance(s, MapSnapshot) else s[1] for s in samples]
    times = [s.t if isinstance(s, MapSnapshot) else s[0] for s in samples]
    data = np.array([np.concatenate([s.u.ravel(), s.v.ravel(), s.w.ravel()]) for s in snaps])
    coef, resid = fit_polynomial(times, data, order, window, degree, max_condition)
    k = order + 1
    return TaylorTable(
        coef[:, :9].reshape(k, 3, 3),
        coef[:, 9:18].reshape(k, 3, 3),
        coef[:, 18:].reshape(k, 3, 3, 3),
        residuals=resid,
    )


def sample_snapshots(h: Hamiltonian, times, method: str = "eigen") -> list[MapSnapshot]:
    return [map_snapshot(h, float(t), method) for t in times]


def factorial_scale(order: int) -> np.ndarray:
    """``m!`` for ``m = 0..order``; multiplies Taylor coefficients into derivatives."""
    return np.array([math.factorial(m) for m in range(order + 1)], dtype=float)
