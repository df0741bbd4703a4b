"""Inverse problem: Hamiltonian parameters from the observed-qubit maps.

Only the u-blocks of a :class:`~twoqubit.dynamics.TaylorTable` are consumed.
The extraction runs order by order:

* order 1 gives ``alpha`` from the antisymmetric part of ``u``;
* order 2 gives the Gram matrix ``gamma_m . gamma_n`` of the interaction rows,
  whose eigenvectors define the observed-qubit frame and whose eigenvalues are
  the squared canonical couplings;
* order 3 gives the products ``g2 g3 b1``, ``g3 g1 b2``, ``g1 g2 b3``;
* order 4 gives the quadratic combinations of ``beta`` (needed when gamma_1 = 0);
* order 6 gives ``g3^2 b1^2 b3^2`` (needed when only gamma_3 survives).

At each order the contribution of already-determined parameters is computed
by evaluating the series of a partially known Hamiltonian, and only the new
unknowns are solved for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import TaylorTable, taylor_maps
from .errors import InsufficientOrderError, MalformedDataError, ReconstructionFailed
from .hamiltonian import CanonicalHamiltonian, axis3_gauge, gram_frame, sign_partner, to_dict

SCHEMA = "twoqubit.reconstruction-report/1"

DEFAULT_EPS = 1e-6
DEFAULT_TOL = 1e-6

REQUIRED_ORDER = {"I": 3, "II": 4, "III": 6, "exception": 4, "no-interaction": 2}


class CaseClass(str, Enum):
    CASE_I = "I"
    CASE_II = "II"
    CASE_III = "III"
    EXCEPTION = "exception"
    NO_INTERACTION = "no-interaction"


@dataclass(eq=False)
class ReconstructionReport:
    case: CaseClass
    candidate_plus: CanonicalHamiltonian
    candidate_minus: CanonicalHamiltonian
    frame_r: np.ndarray
    undetermined: dict[str, str] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def candidates(self) -> tuple[CanonicalHamiltonian, CanonicalHamiltonian]:
        return self.candidate_plus, self.candidate_minus

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "case": self.case.value,
            "candidate_plus": to_dict(self.candidate_plus),
            "candidate_minus": to_dict(self.candidate_minus),
            "frame_R": self.frame_r.tolist(),
            "undetermined": [{"parameter": k, "reason": v} for k, v in self.undetermined.items()],
            "diagnostics": self.diagnostics,
        }


def _series_u(alpha, beta, gamma, m: int) -> np.ndarray:
    """``m``-th derivative (not divided by m!) of the u-block for a canonical Hamiltonian."""
    h = CanonicalHamiltonian(alpha, beta, gamma)
    return taylor_maps(h, m).u[m] * math.factorial(m)


def _derivative(table: TaylorTable, m: int) -> np.ndarray:
    return table.u[m] * math.factorial(m)


def _need(table: TaylorTable, order: int, what: str) -> None:
    if table.order < order:
        raise InsufficientOrderError(
            f"{what} requires Taylor order {order}, table has order {table.order}",
            required=order,
            available=table.order,
        )


def extract_alpha(table: TaylorTable, tol: float = 1e-8) -> np.ndarray:
    """Read ``alpha`` off the first-order u-block, which must be antisymmetric."""
    _need(table, 1, "alpha extraction")
    u1 = table.u[1]
    sym = 0.5 * (u1 + u1.T)
    if np.max(np.abs(sym)) > tol * max(1.0, np.max(np.abs(u1))):
        raise MalformedDataError(
            f"first-order u-block has symmetric part {np.max(np.abs(sym)):.3e}; "
            "no two-qubit Hamiltonian produces this"
        )
    a = 0.5 * (u1 - u1.T)
    return np.array([-a[1, 2], a[0, 2], -a[0, 1]])


def extract_gram(table: TaylorTable, alpha: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Gram matrix of the interaction rows from the second-order u-block.

    The second derivative of ``u`` is ``alpha alpha^T - |alpha|^2 I + G - tr(G) I``;
    with the alpha part removed the diagonal gives ``D_n = sum_{m != n} G_mm``.
    """
    _need(table, 2, "Gram extraction")
    alpha = np.asarray(alpha, dtype=float)
    m = _derivative(table, 2) - (np.outer(alpha, alpha) - alpha @ alpha * np.eye(3))
    scale = max(1.0, np.max(np.abs(m)))
    if np.max(np.abs(m - m.T)) > tol * scale:
        raise MalformedDataError("second-order u-block is not symmetric after removing alpha terms")
    m = 0.5 * (m + m.T)
    d = -np.diag(m)
    trace = d.sum() / 2.0
    gram = m + trace * np.eye(3)
    lowest = np.linalg.eigvalsh(gram)[0]
    if lowest < -tol * scale:
        raise MalformedDataError(f"Gram matrix has negative eigenvalue {lowest:.3e}")
    return gram


def frame_align(table: TaylorTable, gram: np.ndarray) -> tuple[TaylorTable, np.ndarray, np.ndarray]:
    """Rotate the observed-qubit frame so the Gram matrix becomes diagonal.

    Returns the rotated table, the squared couplings (ascending, clipped at 0)
    and the rotation ``R`` applied.
    """
    r, lam = gram_frame(gram)
    return table.rotated(r), np.clip(lam, 0.0, None), r


def classify(gamma_squares, eps: float, beta_perp_sq: float | None = None) -> CaseClass:
    """Case from the sorted squared couplings; ``eps`` is an absolute threshold on gamma.

    ``beta_perp_sq`` is ``beta_1^2 + beta_2^2`` once known; it upgrades case
    III to the exception when it is below ``eps^2``.
    """
    g = np.asarray(gamma_squares, dtype=float)
    if np.any(np.diff(g) < -1e-12 * max(1.0, g.max())):
        raise ValueError("gamma_squares must be sorted ascending")
    small = g <= eps**2
    if small.all():
        return CaseClass.NO_INTERACTION
    if not small.any():
        return CaseClass.CASE_I
    if small[0] and not small[1]:
        return CaseClass.CASE_II
    if beta_perp_sq is not None and beta_perp_sq <= eps**2:
        return CaseClass.EXCEPTION
    return CaseClass.CASE_III


def _quartic_columns(g: np.ndarray) -> np.ndarray:
    """Coefficients of (b1^2, b2^2, b3^2, b1b2, b2b3, b3b1) in the fourth derivative.

    Rows are the entries (1,1), (2,2), (3,3), (1,2), (2,3), (1,3) of the u-block.
    """
    g1, g2, g3 = g**2
    s1, s2, s3 = g
    return np.array(
        [
            [g2 + g3, g3, g2, 0, 0, 0],
            [g3, g1 + g3, g1, 0, 0, 0],
            [g2, g1, g1 + g2, 0, 0, 0],
            [0, 0, 0, s1 * s2, 0, 0],
            [0, 0, 0, 0, s2 * s3, 0],
            [0, 0, 0, 0, 0, s3 * s1],
        ]
    )


_QUARTIC_ENTRIES = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]


def _quartic_data(d4: np.ndarray) -> np.ndarray:
    sym = 0.5 * (d4 + d4.T)
    return np.array([sym[i, j] for i, j in _QUARTIC_ENTRIES])


def extract_beta(
    table: TaylorTable,
    alpha: np.ndarray,
    gammas: np.ndarray,
    case: CaseClass,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, dict[str, str], CaseClass, dict]:
    """``beta`` of the plus branch (gamma_1 >= 0) in the canonical frame.

    ``table`` must already be frame-aligned, ``gammas`` are the non-negative
    coupling magnitudes and ``eps`` the absolute zero threshold.  Returns
    ``(beta, undetermined, case, diagnostics)``; ``case`` may be upgraded from
    III to the exception.
    """
    alpha = np.asarray(alpha, dtype=float)
    g = np.asarray(gammas, dtype=float)
    scale = max(1.0, float(np.sqrt(alpha @ alpha + g @ g)))
    diag: dict = {}
    undetermined: dict[str, str] = {}

    _need(table, 3, "beta extraction")
    d3 = _derivative(table, 3) - _series_u(alpha, np.zeros(3), g, 3)
    p1 = 0.5 * (d3[1, 2] - d3[2, 1])
    p2 = -0.5 * (d3[0, 2] - d3[2, 0])
    p3 = 0.5 * (d3[0, 1] - d3[1, 0])
    sym3 = float(np.max(np.abs(0.5 * (d3 + d3.T))))
    diag["third_order_products"] = [p1, p2, p3]
    diag["third_order_symmetric"] = sym3 / scale**3
    if sym3 > tol * scale**3:
        raise MalformedDataError(f"third-order residual has symmetric part {sym3:.3e}")

    def check_consistency(label: str, resid: float, order: int) -> None:
        rel = resid / scale**order
        diag[label] = rel
        if rel > tol:
            raise MalformedDataError(f"{label}: cross-order inconsistency {rel:.3e} > {tol:.1e}")

    if case is CaseClass.CASE_I:
        beta = np.array([p1 / (g[1] * g[2]), p2 / (g[2] * g[0]), p3 / (g[0] * g[1])])
        if table.order >= 4:
            d4 = _derivative(table, 4) - _series_u(alpha, beta, g, 4)
            check_consistency("fourth_order_consistency", float(np.max(np.abs(d4))), 4)
        return beta, undetermined, case, diag

    if case is CaseClass.CASE_II:
        check_consistency("third_order_vanishing_products", max(abs(p2), abs(p3)), 3)
        b1 = p1 / (g[1] * g[2])
        _need(table, 4, "case II (gamma_1 = 0)")
        d4 = _derivative(table, 4) - _series_u(alpha, np.array([b1, 0.0, 0.0]), g, 4)
        cols = _quartic_columns(g)[:, [1, 2, 4]]
        rhs = _quartic_data(d4)
        y, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
        check_consistency("fourth_order_lstsq_residual", float(np.max(np.abs(cols @ y - rhs))), 4)
        check_consistency("fourth_order_antisymmetric", float(np.max(np.abs(0.5 * (d4 - d4.T)))), 4)
        b2, b3 = np.sqrt(max(y[0], 0.0)), np.sqrt(max(y[1], 0.0))
        if b3 > eps:
            b2 *= np.sign(y[2]) if abs(y[2]) > eps**2 else 1.0
        diag["fourth_order_unknowns"] = {"b2^2": y[0], "b3^2": y[1], "b2*b3": y[2]}
        return np.array([b1, b2, b3]), undetermined, case, diag

    if case in (CaseClass.CASE_III, CaseClass.EXCEPTION):
        check_consistency("third_order_vanishing_products", max(abs(p1), abs(p2), abs(p3)), 3)
        _need(table, 4, "case III (gamma_1 = gamma_2 = 0)")
        d4 = _derivative(table, 4) - _series_u(alpha, np.zeros(3), g, 4)
        cols = _quartic_columns(g)[:, [0]]
        rhs = _quartic_data(d4)
        y, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
        check_consistency("fourth_order_lstsq_residual", float(np.max(np.abs(cols @ y - rhs))), 4)
        b1 = float(np.sqrt(max(y[0], 0.0)))
        diag["fourth_order_unknowns"] = {"b1^2+b2^2": y[0]}
        if classify([0.0, 0.0, g[2] ** 2], eps, beta_perp_sq=b1**2) is CaseClass.EXCEPTION:
            undetermined["beta3"] = "X3 term commutes with the Hamiltonian and with every S_j"
            if table.order >= 6:
                d6 = _derivative(table, 6) - _series_u(alpha, np.zeros(3), g, 6)
                check_consistency("sixth_order_consistency", float(np.max(np.abs(d6))), 6)
            return np.zeros(3), undetermined, CaseClass.EXCEPTION, diag
        _need(table, 6, "case III with beta_1 != 0")
        base = np.array([b1, 0.0, 0.0])
        d5 = _derivative(table, 5) - _series_u(alpha, base, g, 5)
        check_consistency("fifth_order_consistency", float(np.max(np.abs(d5))), 5)
        d6 = _derivative(table, 6) - _series_u(alpha, base, g, 6)
        b3_sq = -0.5 * (d6[0, 0] + d6[1, 1]) / (g[2] ** 2 * b1**2)
        rest = d6.copy()
        rest[0, 0] += g[2] ** 2 * b1**2 * b3_sq
        rest[1, 1] += g[2] ** 2 * b1**2 * b3_sq
        check_consistency("sixth_order_residual", float(np.max(np.abs(rest))), 6)
        diag["sixth_order_unknowns"] = {"b3^2": b3_sq}
        return np.array([b1, 0.0, np.sqrt(max(b3_sq, 0.0))]), undetermined, CaseClass.CASE_III, diag

    raise ValueError(f"extract_beta does not handle case {case}")


def _verify(candidate: CanonicalHamiltonian, table: TaylorTable, scale: float) -> list[float]:
    regen = taylor_maps(candidate, table.order).u
    return [float(np.max(np.abs(regen[m] - table.u[m]))) / scale**m for m in range(table.order + 1)]


def reconstruct(
    table: TaylorTable, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL, verify: bool = True
) -> ReconstructionReport:
    """Recover the two candidate canonical Hamiltonians from u-block Taylor data.

    ``eps`` is the relative zero threshold on couplings and ``beta``; ``tol``
    bounds cross-order inconsistencies and the verification residual, both
    measured per order in units of ``scale**m`` where ``scale`` is the size
    of the parameters inferred at second order.
    """
    alpha0 = extract_alpha(table, tol)
    gram = extract_gram(table, alpha0, tol)
    aligned, lam, r = frame_align(table, gram)
    alpha = extract_alpha(aligned, tol)
    scale = max(1.0, float(np.sqrt(alpha @ alpha + lam.sum())))
    eps_abs = eps * scale
    case = classify(lam, eps_abs)

    if case is CaseClass.CASE_III:
        r = axis3_gauge(alpha, tol=eps_abs) @ r
        aligned = table.rotated(r)
        alpha = extract_alpha(aligned, tol)

    gammas = np.where(lam <= eps_abs**2, 0.0, np.sqrt(lam))
    diagnostics: dict = {"scale": scale, "eps": eps_abs, "gamma_squares": lam.tolist(), "order": table.order}

    if case is CaseClass.NO_INTERACTION:
        plus = CanonicalHamiltonian(alpha, np.zeros(3), np.zeros(3))
        undetermined = {f"beta{k}": "no coupling: the unobserved qubit never influences the observed one" for k in (1, 2, 3)}
    else:
        beta, undetermined, case, extra = extract_beta(aligned, alpha, gammas, case, eps_abs, tol)
        diagnostics.update(extra)
        plus = CanonicalHamiltonian(alpha, beta, gammas)
    minus = sign_partner(plus)

    if verify:
        res_plus = _verify(plus, aligned, scale)
        res_minus = _verify(minus, aligned, scale)
        diagnostics["verification"] = {"plus": res_plus, "minus": res_minus}
        worst = max(max(res_plus), max(res_minus))
        if worst > tol:
            raise ReconstructionFailed(
                f"candidates fail to regenerate the input (worst per-order residual {worst:.3e})",
                diagnostics,
            )
    return ReconstructionReport(case, plus, minus, r, undetermined, diagnostics)
