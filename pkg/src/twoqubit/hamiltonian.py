"""Two-qubit Hamiltonian parameter records and frame canonicalization.

A Hamiltonian is written as

    H = 1/2 alpha_j S_j + 1/2 beta_k X_k + 1/2 gamma_jk S_j X_k

with ``S`` the observed qubit and ``X`` the unobserved one (units with hbar = 1).
The canonical form has a diagonal interaction ``gamma_jk = gamma_j delta_jk``
with the axis convention ``|gamma_1| <= gamma_2 <= gamma_3`` and
``gamma_2, gamma_3 >= 0``; the undetermined sign then lives on ``gamma_1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import SIGMA


def _vec3(x) -> np.ndarray:
    a = np.asarray(x, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {np.shape(x)}")
    return a


@dataclass(eq=False)
class GeneralHamiltonian:
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(3))
    beta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gamma: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        self.alpha = _vec3(self.alpha)
        self.beta = _vec3(self.beta)
        self.gamma = np.asarray(self.gamma, dtype=float)
        if self.gamma.shape != (3, 3):
            raise ValueError("gamma must be a 3x3 array")

    @property
    def gamma_matrix(self) -> np.ndarray:
        return self.gamma

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta, self.gamma.ravel()])


@dataclass(eq=False)
class CanonicalHamiltonian:
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(3))
    beta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gamma: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.alpha = _vec3(self.alpha)
        self.beta = _vec3(self.beta)
        self.gamma = _vec3(self.gamma)

    @property
    def gamma_matrix(self) -> np.ndarray:
        return np.diag(self.gamma)

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta, self.gamma])

    def follows_convention(self, tol: float = 1e-12) -> bool:
        g1, g2, g3 = self.gamma
        return g2 >= -tol and g3 >= -tol and abs(g1) <= g2 + tol and g2 <= g3 + tol

    def to_general(self) -> GeneralHamiltonian:
        return GeneralHamiltonian(self.alpha, self.beta, self.gamma_matrix)


Hamiltonian = GeneralHamiltonian | CanonicalHamiltonian


def to_matrix(h: Hamiltonian) -> np.ndarray:
    eye = SIGMA[0]
    m = np.zeros((4, 4), dtype=complex)
    g = h.gamma_matrix
    for j in range(3):
        m += 0.5 * h.alpha[j] * np.kron(SIGMA[j + 1], eye)
        m += 0.5 * h.beta[j] * np.kron(eye, SIGMA[j + 1])
        for k in range(3):
            m += 0.5 * g[j, k] * np.kron(SIGMA[j + 1], SIGMA[k + 1])
    return m


def parameter_scale(h: Hamiltonian) -> float:
    """Euclidean norm of all parameters; sets the natural inverse time scale."""
    return float(np.sqrt(np.sum(h.alpha**2) + np.sum(h.beta**2) + np.sum(h.gamma_matrix**2)))


def gamma_gram(h: Hamiltonian) -> np.ndarray:
    """Dot products ``gamma_m . gamma_n`` of the interaction rows."""
    g = h.gamma_matrix
    return g @ g.T


def gamma_triple(h: Hamiltonian) -> float:
    """``gamma_1 . (gamma_2 x gamma_3)``, i.e. ``det(gamma)``."""
    g = h.gamma_matrix
    return float(np.dot(g[0], np.cross(g[1], g[2])))


def spectrum(h: Hamiltonian) -> np.ndarray:
    return np.linalg.eigvalsh(to_matrix(h))


def sign_partner(h: CanonicalHamiltonian) -> CanonicalHamiltonian:
    """Flip gamma_1, beta_2, beta_3: the partner with identical single-qubit dynamics."""
    flip = np.array([-1.0, 1.0, 1.0])
    return CanonicalHamiltonian(h.alpha.copy(), h.beta * -flip, h.gamma * flip)


# --- frame construction -----------------------------------------------------


def gram_frame(gram: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotation whose rows are eigenvectors of ``gram``, eigenvalues ascending.

    Each row has its largest-magnitude component made positive and the first
    row is negated if needed so that ``det(R) = +1``.  Both canonicalize and
    the data-side frame alignment go through here so they pick the same gauge.
    """
    gram = 0.5 * (np.asarray(gram, dtype=float) + np.asarray(gram, dtype=float).T)
    lam, vecs = np.linalg.eigh(gram)
    r = vecs.T.copy()
    for row in r:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    if np.linalg.det(r) < 0:
        r[0] *= -1
    return r, lam


def _rot3(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def axis3_gauge(alpha: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Extra frame rotation used when only gamma_3 survives.

    Returns ``Q`` (a rotation about axis 3, possibly followed by a half turn
    about axis 1) such that ``Q @ alpha`` has component 2 zero, component 1
    non-negative and component 3 non-negative.
    """
    alpha = np.asarray(alpha, dtype=float)
    q = np.eye(3)
    if np.hypot(alpha[0], alpha[1]) > tol:
        q = _rot3(np.arctan2(alpha[1], alpha[0]))
    if (q @ alpha)[2] < -tol:
        q = np.diag([1.0, -1.0, -1.0]) @ q
    return q


def _complete_basis(fixed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``fixed`` to a right-handed frame (a, b, fixed)."""
    trial = np.eye(3)[np.argmin(np.abs(fixed))]
    a = trial - np.dot(trial, fixed) * fixed
    a /= np.linalg.norm(a)
    b = np.cross(fixed, a)
    return a, b


def canonicalize(
    h: GeneralHamiltonian | CanonicalHamiltonian, zero_tol: float = 1e-12
) -> tuple[CanonicalHamiltonian, np.ndarray, np.ndarray]:
    """Rotate both qubit frames so the interaction is diagonal.

    Returns ``(canonical, R, S)`` with ``S_new = R S_old`` and ``X_new = S X_old``;
    then ``alpha -> R alpha``, ``beta -> S beta`` and ``gamma -> R gamma S^T``
    is diagonal.  The interaction triple product is unchanged.
    """
    gamma = h.gamma_matrix
    scale = max(1.0, parameter_scale(h))
    tiny = zero_tol * scale

    r, _ = gram_frame(gamma @ gamma.T)
    w = r @ gamma
    norms = np.linalg.norm(w, axis=1)

    if norms[1] <= tiny and norms[2] > tiny:
        r = axis3_gauge(r @ h.alpha, tol=tiny) @ r
        w = r @ gamma

    s = np.eye(3)
    if norms[2] > tiny:
        s3 = w[2] / norms[2]
        if norms[1] > tiny:
            s2 = w[1] / norms[1]
            s1 = np.cross(s2, s3)
        else:
            s1, s2 = _complete_basis(s3)
            b = np.array([s1, s2]) @ h.beta
            if np.hypot(*b) > tiny:
                phi = np.arctan2(b[1], b[0])
                s1, s2 = np.cos(phi) * s1 + np.sin(phi) * s2, -np.sin(phi) * s1 + np.cos(phi) * s2
        s = np.array([s1, s2, s3])

    gdiag = np.diag(r @ gamma @ s.T).copy()
    canon = CanonicalHamiltonian(r @ h.alpha, s @ h.beta, gdiag)
    return canon, r, s


# --- sampling and serialization ----------------------------------------------


def random_general(rng: np.random.Generator, low: float = -2.0, high: float = 2.0) -> GeneralHamiltonian:
    return GeneralHamiltonian(
        rng.uniform(low, high, 3), rng.uniform(low, high, 3), rng.uniform(low, high, (3, 3))
    )


def random_canonical(
    rng: np.random.Generator, low: float = -2.0, high: float = 2.0, case: str = "I"
) -> CanonicalHamiltonian:
    """Random canonical Hamiltonian obeying the axis convention.

    ``case`` is ``"I"`` (all gammas nonzero), ``"II"`` (gamma_1 = 0) or
    ``"III"`` (gamma_1 = gamma_2 = 0 with the axis-3 gauge: alpha_2 = beta_2 = 0,
    alpha_1, alpha_3 >= 0, beta_1 > 0).
    """
    alpha = rng.uniform(low, high, 3)
    beta = rng.uniform(low, high, 3)
    mags = np.sort(rng.uniform(0.2, high, 3))
    gamma = np.array([mags[0] * rng.choice([-1.0, 1.0]), mags[1], mags[2]])
    if case == "II":
        gamma[0] = 0.0
    elif case == "III":
        gamma[:2] = 0.0
        alpha = np.array([abs(alpha[0]), 0.0, abs(alpha[2])])
        beta[0] = abs(beta[0]) + 0.1
        beta[1] = 0.0
    elif case != "I":
        raise ValueError(f"unknown case {case!r}")
    return CanonicalHamiltonian(alpha, beta, gamma)


def to_dict(h: Hamiltonian) -> dict:
    gamma = h.gamma.tolist()
    return {"alpha": h.alpha.tolist(), "beta": h.beta.tolist(), "gamma": gamma}


def from_dict(d: dict) -> Hamiltonian:
    """Parse the Hamiltonian JSON schema; a flat gamma list means canonical form."""
    missing = {"alpha", "beta", "gamma"} - set(d)
    if missing:
        raise ValueError(f"Hamiltonian record missing fields: {sorted(missing)}")
    gamma = np.asarray(d["gamma"], dtype=float)
    if gamma.shape == (3,):
        return CanonicalHamiltonian(d["alpha"], d["beta"], gamma)
    if gamma.shape == (3, 3):
        return GeneralHamiltonian(d["alpha"], d["beta"], gamma)
    raise ValueError(f"gamma must have 3 or 3x3 entries, got shape {gamma.shape}")
