"""Arithmetic over the two-qubit Pauli product basis.

Operators on the two-qubit space are plain ``(4, 4)`` complex numpy arrays.
The sixteen basis elements are ``Sigma_s (x) Xi_x`` with ``s, x`` in ``0..3``
(index 0 is the identity), stored in lexicographic order so that element
``(s, x)`` sits at flat position ``4 * s + x``.  The single-qubit matrices are
the standard ones, with ``sigma_1 sigma_2 = i sigma_3``.

Coefficient vectors are real ``(16,)`` arrays ``c`` with ``m = sum_e c[e] B_e``.
"""

from __future__ import annotations

import itertools
import warnings

import numpy as np

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

ELEMENTS: tuple[tuple[int, int], ...] = tuple(itertools.product(range(4), range(4)))

_BASIS = np.array([np.kron(SIGMA[s], SIGMA[x]) for s, x in ELEMENTS])


def index(s: int, x: int) -> int:
    """Flat position of basis element ``(s, x)``."""
    if not (0 <= s < 4 and 0 <= x < 4):
        raise ValueError(f"invalid Pauli basis element ({s}, {x})")
    return 4 * s + x


def element(i: int) -> tuple[int, int]:
    return ELEMENTS[i]


def label(e: tuple[int, int]) -> str:
    s, x = e
    if s == 0 and x == 0:
        return "I"
    parts = []
    if s:
        parts.append(f"S{s}")
    if x:
        parts.append(f"X{x}")
    return "".join(parts)


def basis_matrix(e: tuple[int, int]) -> np.ndarray:
    """Kronecker product ``Sigma_s (x) Xi_x`` for ``e = (s, x)``."""
    return _BASIS[index(*e)].copy()


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def pauli_expand(m: np.ndarray) -> np.ndarray:
    """Expand a 4x4 operator over the product basis.

    ``coeffs[e] = trace(B_e m) / 4``.  Hermitian input gives a real vector;
    anything else triggers a warning and the complex coefficients are returned.
    """
    m = np.asarray(m, dtype=complex)
    coeffs = np.einsum("eij,ji->e", _BASIS, m) / 4.0
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
        warnings.warn("pauli_expand: operator is not Hermitian", stacklevel=2)
        return coeffs
    return coeffs.real.copy()


def from_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pauli_expand`."""
    return np.einsum("e,eij->ij", np.asarray(coeffs), _BASIS)


def adjoint_matrix(h: np.ndarray) -> np.ndarray:
    """Matrix of ``O -> -i [O, h]`` acting on coefficient vectors.

    Column ``e`` holds the expansion of ``-i [B_e, h]``, so a coefficient vector
    evolves as ``c(t) = expm(t A) c(0)`` under the Heisenberg equation
    ``dO/dt = -i [O, H]``.
    """
    h = np.asarray(h, dtype=complex)
    a = np.empty((16, 16))
    for i in range(16):
        a[:, i] = pauli_expand(-1j * commutator(_BASIS[i], h))
    return a


def product_table() -> dict[tuple[int, int], tuple[complex, int] | None]:
    """Commutators of every pair of basis elements.

    Maps ``(i, j)`` to ``None`` when ``[B_i, B_j] = 0`` and otherwise to
    ``(phase, k)`` with ``[B_i, B_j] = phase * B_k``.
    """
    table: dict[tuple[int, int], tuple[complex, int] | None] = {}
    for i, j in itertools.product(range(16), repeat=2):
        c = commutator(_BASIS[i], _BASIS[j])
        if np.max(np.abs(c)) < 1e-14:
            table[i, j] = None
            continue
        coeffs = np.einsum("eij,ji->e", _BASIS, c) / 4.0
        nz = np.flatnonzero(np.abs(coeffs) > 1e-14)
        if len(nz) != 1:
            raise AssertionError(f"commutator of {i}, {j} is not a single element")
        table[i, j] = (complex(coeffs[nz[0]]), int(nz[0]))
    return table
