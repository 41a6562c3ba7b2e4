"""Generalized staggered circuit built from inhomogeneous transfer matrices.

The brickwork model is a one-parameter slice of a two-inhomogeneity
family: each site of a length-L chain carries one of two spectral
shifts theta_1, theta_2, the transfer matrix traces an ordered product
of six-vertex R matrices over an auxiliary spin, and the Floquet
operator is the ratio T(theta_2) T(theta_1)^{-1}.  Only the difference
theta_21 = theta_2 - theta_1 enters the local gate, while the
arrangement of the shifts along the chain changes overlaps but not
spectra.  Everything here is numeric (complex128): the exact rational
pipeline stays specific to the brickwork slice.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import sector_basis

__all__ = [
    "StaggeredError", "StaggeredParams", "staggered_gate",
    "transfer_matrix", "staggered_floquet", "staggered_eigenvalue",
    "unitarity_defects", "UnitarityLocus", "staggered_unitarity_locus",
    "brickwork_slice",
]


class StaggeredError(ValueError):
    """Invalid staggered-model input or a degenerate parameter point."""


# relative cut below which a sinh denominator counts as a pole
_POLE_REL = 1e-12
# dense auxiliary-trace construction; blocks are 2^L x 2^L
_MAX_L = 10


def _c(z):
    return complex(z)


@dataclass(frozen=True)
class StaggeredParams:
    """Two-inhomogeneity circuit: shifts, anisotropy, site arrangement.

    labels assigns shift 1 or 2 to each site; its length is the chain
    length L.  theta_21 = theta2 - theta1 is the local gate parameter,
    a = e^theta1 and b = e^theta2 are the multiplicative positions used
    by the unitarity analysis.
    """

    theta1: complex
    theta2: complex
    eta: complex
    labels: tuple

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise StaggeredError("arrangement needs at least two sites")
        if any(v not in (1, 2) for v in labels):
            raise StaggeredError("arrangement labels must be 1 or 2")
        object.__setattr__(self, "theta1", _c(self.theta1))
        object.__setattr__(self, "theta2", _c(self.theta2))
        object.__setattr__(self, "eta", _c(self.eta))

    @property
    def L(self) -> int:
        return len(self.labels)

    @property
    def theta21(self) -> complex:
        return self.theta2 - self.theta1

    @property
    def a(self) -> complex:
        return cmath.exp(self.theta1)

    @property
    def b(self) -> complex:
        return cmath.exp(self.theta2)

    @property
    def nus(self) -> tuple:
        return tuple(self.theta1 if v == 1 else self.theta2
                     for v in self.labels)

    @classmethod
    def alternating(cls, theta1, theta2, eta, L):
        """Shift pattern 1,2,1,2,...; L even."""
        if L % 2:
            raise StaggeredError("alternating arrangement needs even L")
        return cls(theta1, theta2, eta, (1, 2) * (L // 2))

    @classmethod
    def blocked(cls, theta1, theta2, eta, L):
        """Shift pattern 1,1,2,2,... repeating with period four."""
        if L % 4:
            raise StaggeredError(
                "blocked arrangement repeats with period 4; L must divide")
        return cls(theta1, theta2, eta, (1, 1, 2, 2) * (L // 4))


def staggered_gate(theta21, eta) -> np.ndarray:
    """4x4 two-site gate of the staggered family.

    Corners 1; middle block sinh(eta) and sinh(theta21) over
    sinh(eta + theta21).  theta21 = 0 gives the identity gate.
    """
    theta21 = _c(theta21)
    eta = _c(eta)
    se = cmath.sinh(eta)
    st = cmath.sinh(theta21)
    den = cmath.sinh(eta + theta21)
    if abs(den) <= _POLE_REL * max(1.0, abs(se), abs(st)):
        raise StaggeredError(
            f"gate pole: sinh(eta + theta21) vanishes at theta21={theta21}")
    bb = se / den
    cc = st / den
    return np.array([[1, 0, 0, 0],
                     [0, bb, cc, 0],
                     [0, cc, bb, 0],
                     [0, 0, 0, 1]], dtype=complex)


_DIAG0 = np.diag
_RAISE = np.array([[0, 0], [1, 0]], dtype=complex)   # |1><0| on a site
_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)   # |0><1|


def transfer_matrix(u, params: StaggeredParams, M=None) -> np.ndarray:
    """Inhomogeneous transfer matrix at spectral parameter u.

    Auxiliary trace of R_{L,a}(u - nu_L) ... R_{1,a}(u - nu_1), built
    site by site as a 2x2 auxiliary block of growing chain operators.
    Site 1 occupies the most significant bit, matching the sector basis
    masks, so full-space indices are the basis masks themselves.  With
    M given the result is restricted to the magnon-number sector.
    """
    u = _c(u)
    L = params.L
    if L > _MAX_L:
        raise StaggeredError(
            f"dense transfer-matrix construction is limited to L <= {_MAX_L}")
    h = cmath.sinh(params.eta)
    one = np.ones((1, 1), dtype=complex)
    zero = np.zeros((1, 1), dtype=complex)
    A, B, C, D = one, zero.copy(), zero.copy(), one.copy()
    for nu in params.nus:
        f = cmath.sinh(u - nu + params.eta)
        g = cmath.sinh(u - nu)
        fg = np.diag([f, g]).astype(complex)
        gf = np.diag([g, f]).astype(complex)
        A, B, C, D = (np.kron(A, fg) + h * np.kron(C, _RAISE),
                      np.kron(B, fg) + h * np.kron(D, _RAISE),
                      h * np.kron(A, _LOWER) + np.kron(C, gf),
                      h * np.kron(B, _LOWER) + np.kron(D, gf))
    T = A + D
    if M is None:
        return T
    basis = sector_basis(L, M)
    idx = np.array(basis.states, dtype=int)
    return T[np.ix_(idx, idx)]


def _vacuum_eigenvalue(u, params: StaggeredParams) -> complex:
    """Eigenvalue of the transfer matrix on the polarized vacuum,
    a(u) + d(u) with a = prod sinh(u - nu_j + eta), d = prod
    sinh(u - nu_j)."""
    a = d = 1.0 + 0j
    for nu in params.nus:
        a *= cmath.sinh(u - nu + params.eta)
        d *= cmath.sinh(u - nu)
    return a + d


def staggered_floquet(params: StaggeredParams, M=None) -> np.ndarray:
    """Floquet operator T(theta_2) T(theta_1)^{-1} in one sector.

    Each transfer matrix is normalized by its polarized-vacuum
    eigenvalue, which fixes the scalar ambiguity of the trace
    construction: the vacuum evolves trivially, the empty Bethe set has
    unit eigenvalue, and the brickwork slice reproduces the gate-layer
    spectrum.  theta_1 = theta_2 gives the identity.  A transfer matrix
    that is singular in the sector aborts with its condition number.
    """
    n2 = _vacuum_eigenvalue(params.theta2, params)
    n1 = _vacuum_eigenvalue(params.theta1, params)
    if abs(n1) < 1e-300 or abs(n2) < 1e-300:
        raise StaggeredError(
            "vacuum transfer eigenvalue vanishes; normalization undefined")
    T2 = transfer_matrix(params.theta2, params, M) / n2
    T1 = transfer_matrix(params.theta1, params, M) / n1
    cond = np.linalg.cond(T1)
    if not np.isfinite(cond) or cond > 1e12:
        raise StaggeredError(
            "transfer matrix at theta1 is not invertible in this sector "
            f"(condition number {cond:.3e})")
    return T2 @ np.linalg.inv(T1)


def staggered_eigenvalue(roots, theta1, theta2, eta) -> complex:
    """Floquet eigenvalue of a Bethe root set for the staggered family.

    Lambda = prod_k sinh(u_k - theta2 + eta) sinh(u_k - theta1)
                  / ( sinh(u_k - theta1 + eta) sinh(u_k - theta2) ).
    Accepts a BetheRoots container or an iterable of rapidities; an
    empty set gives 1.
    """
    us = getattr(roots, "roots", roots)
    theta1, theta2, eta = _c(theta1), _c(theta2), _c(eta)
    lam = 1.0 + 0j
    for u in us:
        u = _c(u)
        n1 = cmath.sinh(u - theta2 + eta)
        n2 = cmath.sinh(u - theta1)
        d1 = cmath.sinh(u - theta1 + eta)
        d2 = cmath.sinh(u - theta2)
        scale = max(abs(n1), abs(n2), 1.0)
        if abs(d1) <= _POLE_REL * scale or abs(d2) <= _POLE_REL * scale:
            raise StaggeredError(f"eigenvalue pole at rapidity u={u}")
        lam *= (n1 / d1) * (n2 / d2)
    return lam


# ---------------------------------------------------------------------------
# local unitarity


def unitarity_defects(a, b, q):
    """Defects of the two local-unitarity conditions at positions (a, b).

    With sinh written in the multiplicative variables r = b/a and q,
    the gate is unitary iff sinh(theta21)/sinh(eta) is imaginary and
    |sinh eta|^2 + |sinh theta21|^2 = |sinh(eta + theta21)|^2.  Returns
    (reality defect, modulus defect); both vanish on the locus.
    """
    a, b, q = _c(a), _c(b), _c(q)
    if a == 0 or b == 0:
        raise StaggeredError("unitarity analysis needs nonzero a and b")
    if q == 0 or abs(q * q - 1) <= 1e-14 * abs(q):
        raise StaggeredError("anisotropy is degenerate (sinh eta = 0)")
    r = b / a
    s21 = (r - 1 / r) / 2
    seta = (q - 1 / q) / 2
    ssum = (q * r - 1 / (q * r)) / 2
    if abs(ssum) <= _POLE_REL * max(1.0, abs(s21), abs(seta)):
        raise StaggeredError(f"gate pole at a={a}, b={b}")
    ratio = s21 / seta
    d_real = abs(ratio.real) / (1 + abs(ratio))
    d_mod = abs(abs(seta) ** 2 + abs(s21) ** 2 - abs(ssum) ** 2) \
        / abs(ssum) ** 2
    return d_real, d_mod


@dataclass(frozen=True)
class UnitarityLocus:
    """Locus of gate-unitary inhomogeneity positions a at fixed b.

    Massive anisotropy confines a to the circle |a| = |b| (compact
    zero loci); massless anisotropy leaves the line a in b*R through
    the origin (extended radial loci).
    """

    regime: str
    shape: str
    b: complex
    q: complex

    def sample(self, n: int) -> tuple:
        """n points on the locus (line samples avoid the origin)."""
        if n < 1:
            raise StaggeredError("need at least one sample")
        if self.shape == "circle":
            rad = abs(self.b)
            return tuple(rad * cmath.exp(2j * math.pi * k / n)
                         for k in range(n))
        ts = [math.tan(math.pi * (k + 0.5) / n - math.pi / 2)
              for k in range(n)]
        return tuple(self.b * t for t in ts if abs(t) > 1e-12)

    def defects(self, a):
        return unitarity_defects(a, self.b, self.q)

    def check(self, a, tol=1e-12) -> bool:
        return max(self.defects(a)) < tol


def staggered_unitarity_locus(q, b=1.0) -> UnitarityLocus:
    """Classify the unitarity locus of a at fixed b for anisotropy q.

    Real q > 0 (q != 1) is massive: the circle |a| = |b|.  Unimodular
    q with q^4 != 1 is massless: the line a in b*R.  The special
    points q^4 = 1 (sin 2*gamma = 0, or eta = 0) are unsupported.
    """
    q = _c(q)
    b = _c(b)
    if b == 0:
        raise StaggeredError("locus classification needs b != 0")
    if q == 0:
        raise StaggeredError("anisotropy q must be nonzero")
    if abs(q ** 4 - 1) <= 1e-12:
        raise StaggeredError(
            "special anisotropy point (q^4 = 1): locus not defined")
    if abs(q.imag) <= 1e-14 * abs(q):
        if q.real <= 0:
            raise StaggeredError(
                "massive regime needs real positive q = e^eta")
        return UnitarityLocus("massive", "circle", b, q)
    if abs(abs(q) - 1) <= 1e-12:
        return UnitarityLocus("massless", "line", b, q)
    raise StaggeredError(
        "anisotropy is neither real (massive) nor unimodular (massless)")


# ---------------------------------------------------------------------------
# brickwork slice


def brickwork_slice(q, x, L, arrangement="alternating") -> StaggeredParams:
    """Staggered parameters reproducing the brickwork circuit at x.

    theta2 = log x, theta1 = -log x, eta = log q: the gate at
    theta21 = 2 log x has exactly the brickwork entries b(x), c(x).
    """
    x = _c(x)
    q = _c(q)
    if x == 0 or q == 0:
        raise StaggeredError("brickwork slice needs nonzero q and x")
    theta = cmath.log(x)
    eta = cmath.log(q)
    ctor = {"alternating": StaggeredParams.alternating,
            "blocked": StaggeredParams.blocked}.get(arrangement)
    if ctor is None:
        raise StaggeredError(f"unknown arrangement {arrangement!r}")
    return ctor(-theta, theta, eta, L)
