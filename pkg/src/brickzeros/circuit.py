"""Brickwork Floquet circuit: gate algebra, sector bases, exact evolution.

One Floquet step applies an odd layer of two-site gates on bonds
(1,2),(3,4),...,(L-1,L) followed by an even layer on bonds
(2,3),(4,5),...,(L,1), with periodic sites and even L.  In the two-site
basis {00,01,10,11} the gate has unit corners and middle block
[[b, c], [c, b]] with

    b(x) = (q^2 - 1) x^2 / (q^2 x^4 - 1)
    c(x) = q (x^4 - 1) / (q^2 x^4 - 1)

so magnetization is conserved and the circuit splits into sectors of
fixed magnon number M (a set bit marks a magnon).  Site j of 1..L maps
to bit L-j of the basis mask, so the string "1000" for L=4 is mask 8.

Exact evolution keeps every sector amplitude as a Gaussian-integer
polynomial in y = x^2 over a per-state power of the cleared denominator
D(y) = cq^2 q^2 y^2 - cq^2 (cq clears the denominator of q), which keeps
the bookkept denominator exponent minimal: a state's exponent grows only
when a gate actually mixes it with a partner.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpc, mpf, workdps

from .exactarith import DensePoly, GaussRat, RationalFn


class CircuitError(ValueError):
    pass


class DegenerateParameterError(CircuitError):
    """q in {0, 1, -1}: the gate family degenerates (Delta = +-1 anisotropy)."""


class PoleError(CircuitError):
    """Evaluation point annihilates the gate denominator q^2 x^4 - 1."""


def _as_mpc(v):
    if isinstance(v, GaussRat):
        return v.to_mpc()
    if isinstance(v, (int, float)):
        return mpc(v)
    return mpc(v)


@dataclass(frozen=True)
class CircuitParams:
    """Circuit configuration: gate parameter q, size L, magnon sector M.

    mode 'exact' requires a GaussRat q; mode 'float' stores q as mpc.
    x0 optionally fixes the evaluation point for numeric operations.
    """

    q: object
    L: int
    M: int
    mode: str = "exact"
    x0: object = None

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise CircuitError(f"L must be even and >= 2, got {self.L}")
        if not 0 <= self.M <= self.L:
            raise CircuitError(f"M must lie in 0..L, got {self.M}")
        if self.mode == "exact":
            q = GaussRat.coerce(self.q)
            if q.is_zero() or q == GaussRat(1) or q == GaussRat(-1):
                raise DegenerateParameterError(
                    "q in {0, 1, -1} degenerates the gate family (Delta = +-1)")
            object.__setattr__(self, "q", q)
            if self.x0 is not None:
                object.__setattr__(self, "x0", GaussRat.coerce(self.x0))
        elif self.mode == "float":
            q = _as_mpc(self.q)
            if abs(q) < mpf("1e-30") or abs(q - 1) < mpf("1e-30") \
                    or abs(q + 1) < mpf("1e-30"):
                raise DegenerateParameterError(
                    "q within 1e-30 of {0, 1, -1} degenerates the gate family")
            object.__setattr__(self, "q", q)
            if self.x0 is not None:
                object.__setattr__(self, "x0", _as_mpc(self.x0))
        else:
            raise CircuitError(f"mode must be 'exact' or 'float', got {self.mode!r}")

    @property
    def delta(self):
        """Anisotropy (q + 1/q) / 2."""
        if self.mode == "exact":
            return (self.q + self.q.inverse()) * GaussRat(Fraction(1, 2))
        return (self.q + 1 / self.q) / 2

    @property
    def regime(self) -> str:
        """'massive' (real q, |Delta|>1), 'massless' (|q|=1, |Delta|<1), 'other'."""
        if self.mode == "exact":
            if self.q.is_real():
                return "massive"
            if self.q.norm2() == 1:
                return "massless"
            return "other"
        if abs(self.q.imag) < mpf("1e-30"):
            return "massive"
        if abs(abs(self.q) - 1) < mpf("1e-30"):
            return "massless"
        return "other"

    def q_mpc(self):
        return _as_mpc(self.q)

    def with_sector(self, M: int) -> "CircuitParams":
        return CircuitParams(self.q, self.L, M, self.mode, self.x0)


# ---------------------------------------------------------------------------
# gate entries


@dataclass(frozen=True)
class GateEntries:
    """Exact middle-block entries b, c and their common denominator d."""

    b: RationalFn
    c: RationalFn
    d: DensePoly


def gate_entries(q: GaussRat) -> GateEntries:
    """Entries of the two-site gate as rational functions of x at fixed q."""
    q = GaussRat.coerce(q)
    if q.is_zero() or q * q == GaussRat(1):
        raise DegenerateParameterError("gate entries undefined at q in {0, 1, -1}")
    q2 = q * q
    d = DensePoly([GaussRat(-1), GaussRat(0), GaussRat(0), GaussRat(0), q2])
    b_num = DensePoly.monomial(q2 - GaussRat(1), 2)
    c_num = DensePoly([-q, GaussRat(0), GaussRat(0), GaussRat(0), q])
    return GateEntries(
        b=RationalFn(b_num, d),
        c=RationalFn(c_num, d),
        d=d,
    )


def gate_values_numeric(q, x):
    """(b, c) of the two-site gate at numeric (q, x); raises PoleError at poles."""
    q = _as_mpc(q)
    x = _as_mpc(x)
    x2 = x * x
    den = q * q * x2 * x2 - 1
    if abs(den) < mpf(10) ** (-mp.dps + 8):
        raise PoleError("q^2 x^4 - 1 vanishes at the requested point")
    return (q * q - 1) * x2 / den, q * (x2 * x2 - 1) / den


def physical_gate(alpha, phi) -> np.ndarray:
    """4x4 two-site gate U(alpha, phi) in the basis {00, 01, 10, 11}."""
    a, p = complex(alpha), complex(phi)
    ep = np.exp(-1j * p)
    ca, sa = np.cos(a), np.sin(a)
    return np.array([
        [1, 0, 0, 0],
        [0, ep * ca, 1j * ep * sa, 0],
        [0, 1j * ep * sa, ep * ca, 0],
        [0, 0, 0, 1],
    ], dtype=complex)


def gauge_reduced_gate(alpha, phi) -> np.ndarray:
    """Gauge transform exp(i phi) exp(-i phi (s1z+s2z)/2) U: unit corners except
    the 11-corner, which becomes exp(2 i phi)."""
    a, p = complex(alpha), complex(phi)
    ca, sa = np.cos(a), np.sin(a)
    return np.array([
        [1, 0, 0, 0],
        [0, ca, 1j * sa, 0],
        [0, 1j * sa, ca, 0],
        [0, 0, 0, np.exp(2j * p)],
    ], dtype=complex)


def match_gate_parameters(q, x):
    """(alpha, phi) with tan(alpha) = -i sinh(xi)/sinh(eta) and
    exp(-2 i phi) = -sinh(xi - eta)/sinh(xi + eta), where q = e^eta, x = e^(xi/2).

    Principal logarithm branches; alpha and phi are complex off the
    unitarity locus and real (up to rounding) on it.
    """
    q = _as_mpc(q)
    x = _as_mpc(x)
    eta = mp.log(q)
    xi = 2 * mp.log(x)
    alpha = mp.atan(-1j * mp.sinh(xi) / mp.sinh(eta))
    rhs = -mp.sinh(xi - eta) / mp.sinh(xi + eta)
    phi = mp.log(rhs) / (-2j)
    return alpha, phi


# ---------------------------------------------------------------------------
# sector bases


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of the magnon-number sector: masks ascending as integers."""

    L: int
    M: int
    states: tuple

    def index_of(self, mask: int) -> int:
        lo, hi = 0, len(self.states)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.states[mid] < mask:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(self.states) or self.states[lo] != mask:
            raise CircuitError(f"mask {mask:b} not in sector (L={self.L}, M={self.M})")
        return lo

    def mask_to_string(self, mask: int) -> str:
        return format(mask, f"0{self.L}b")

    @property
    def dim(self) -> int:
        return len(self.states)


@lru_cache(maxsize=None)
def sector_basis(L: int, M: int) -> SectorBasis:
    if L < 1 or not 0 <= M <= L:
        raise CircuitError(f"invalid sector (L={L}, M={M})")
    states = tuple(sorted(
        sum(1 << b for b in bits)
        for bits in itertools.combinations(range(L), M)))
    return SectorBasis(L, M, states)


def site_bit(L: int, site: int) -> int:
    """Bit position of 1-based site index; site 1 is the leftmost string slot."""
    if not 1 <= site <= L:
        raise CircuitError(f"site {site} outside 1..{L}")
    return L - site


def brickwork_bonds(L: int):
    """(odd_layer, even_layer) lists of 1-based site pairs; one step = odd then even."""
    odd = [(j, j + 1) for j in range(1, L, 2)]
    even = [(j, j + 1) for j in range(2, L - 1, 2)] + [(L, 1)]
    return odd, even


@lru_cache(maxsize=None)
def _gate_tables(L: int, M: int):
    """Per gate of the two layers: list of index pairs (ia, ib) the gate mixes.

    ia carries the magnon on the first site of the bond, ib on the second;
    the symmetric middle block makes the orientation immaterial.
    """
    basis = sector_basis(L, M)
    odd, even = brickwork_bonds(L)
    tables = []
    for (i, j) in odd + even:
        bi, bj = 1 << site_bit(L, i), 1 << site_bit(L, j)
        pairs = []
        for idx, mask in enumerate(basis.states):
            if (mask & bi) and not (mask & bj):
                pairs.append((idx, basis.index_of(mask ^ bi ^ bj)))
        tables.append(tuple(pairs))
    return tuple(tables)


# ---------------------------------------------------------------------------
# fast Gaussian-integer polynomial kernels in y = x^2
#
# A kernel polynomial is a pair (re, im) of equal-length int lists, im may
# be None when identically real.  The zero polynomial is ([], None).


def _k_is_zero(p):
    re, im = p
    return not any(re) and (im is None or not any(im))


def _k_add(p, q):
    pre, pim = p
    qre, qim = q
    n = max(len(pre), len(qre))
    re = [0] * n
    for i, v in enumerate(pre):
        re[i] = v
    for i, v in enumerate(qre):
        re[i] += v
    if pim is None and qim is None:
        return (re, None)
    im = [0] * n
    if pim is not None:
        for i, v in enumerate(pim):
            im[i] = v
    if qim is not None:
        for i, v in enumerate(qim):
            im[i] += v
    return (re, im)


def _k_scale_shift(p, g, k):
    """g * y^k * p for Gaussian-int scalar g = (gr, gi)."""
    pre, pim = p
    gr, gi = g
    n = len(pre) + k
    if gi == 0 and pim is None:
        re = [0] * k + [gr * v for v in pre]
        return (re, None)
    re = [0] * n
    im = [0] * n
    if pim is None:
        for i, v in enumerate(pre):
            re[i + k] = gr * v
            im[i + k] = gi * v
    else:
        for i in range(len(pre)):
            a, b = pre[i], pim[i]
            re[i + k] = gr * a - gi * b
            im[i + k] = gr * b + gi * a
    return (re, im)


def _k_dmul(p, g3, c2):
    """(g3 * y^2 - c2) * p with Gaussian-int g3 and positive int c2."""
    pre, pim = p
    g3r, g3i = g3
    n = len(pre) + 2
    if g3i == 0 and pim is None:
        re = [0] * n
        for i, v in enumerate(pre):
            re[i] = -c2 * v
        for i, v in enumerate(pre):
            re[i + 2] += g3r * v
        return (re, None)
    re = [0] * n
    im = [0] * n
    if pim is None:
        pim = [0] * len(pre)
    for i in range(len(pre)):
        a, b = pre[i], pim[i]
        re[i] -= c2 * a
        im[i] -= c2 * b
        re[i + 2] += g3r * a - g3i * b
        im[i + 2] += g3r * b + g3i * a
    return (re, im)


def _k_dpow(p, t, g3, c2):
    for _ in range(t):
        p = _k_dmul(p, g3, c2)
    return p


def _k_csub(p, g2):
    """g2 * (y^2 - 1) * p."""
    shifted = _k_scale_shift(p, g2, 2)
    neg = _k_scale_shift(p, (-g2[0], -g2[1]), 0)
    return _k_add(shifted, neg)


def _k_trim(p):
    re, im = p
    n = len(re)
    while n and not re[n - 1] and (im is None or not im[n - 1]):
        n -= 1
    return (re[:n], im[:n] if im is not None else None)


def _clear_q(q: GaussRat):
    """q -> (Gaussian-int numerator pair, positive int denominator)."""
    den = q.re.denominator * q.im.denominator // math.gcd(
        q.re.denominator, q.im.denominator)
    return (int(q.re * den), int(q.im * den)), den


def _gate_scalars(q: GaussRat):
    """Cleared kernel scalars: g1 (b-channel), g2 (c-channel), g3 with
    D(y) = g3 y^2 - cq^2 the cleared gate denominator in y = x^2."""
    (aq, bq), cq = _clear_q(q)
    c2 = cq * cq
    q2 = (aq * aq - bq * bq, 2 * aq * bq)
    g1 = (q2[0] - c2, q2[1])
    g2 = (cq * aq, cq * bq)
    return g1, g2, q2, c2


# ---------------------------------------------------------------------------
# public exact evolution


@dataclass(frozen=True)
class SectorState:
    """Sector coefficient vector with DensePoly (in x) amplitudes."""

    basis: SectorBasis
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.basis.dim:
            raise CircuitError("coefficient count does not match sector dimension")


def _poly_to_kernel(p: DensePoly, den_lcm: int):
    """Split p(x) scaled by den_lcm into even/odd kernel polys in y = x^2."""
    ints, d = p.clear_denominators()
    scale = den_lcm // d
    even_re, even_im, odd_re, odd_im = [], [], [], []
    has_im = any(b for _, b in ints)
    for e, (a, b) in enumerate(ints):
        tgt_re, tgt_im = (even_re, even_im) if e % 2 == 0 else (odd_re, odd_im)
        idx = e // 2
        while len(tgt_re) <= idx:
            tgt_re.append(0)
            tgt_im.append(0)
        tgt_re[idx] = a * scale
        tgt_im[idx] = b * scale
    even = (even_re, even_im if has_im else None)
    odd = (odd_re, odd_im if has_im else None)
    return even, odd


def _kernel_to_poly(even, odd, denom: GaussRat) -> DensePoly:
    ere, eim = even
    ore, oim = odd
    n = max(2 * len(ere), 2 * len(ore) + 1)
    coeffs = [GaussRat(0)] * n
    inv = denom.inverse() if not denom.is_zero() else None
    for i in range(len(ere)):
        a = ere[i]
        b = eim[i] if eim is not None else 0
        if a or b:
            coeffs[2 * i] = GaussRat(a, b) * inv
    for i in range(len(ore)):
        a = ore[i]
        b = oim[i] if oim is not None else 0
        if a or b:
            coeffs[2 * i + 1] = GaussRat(a, b) * inv
    return DensePoly(coeffs)


def apply_floquet_exact(state: SectorState, params: CircuitParams, n: int):
    """Evolve n Floquet steps exactly.

    Returns (SectorState, K) whose coefficients equal d(x)^K * U^n |state>
    with d(x) = q^2 x^4 - 1 and a single bookkept exponent K >= 0.
    """
    if params.mode != "exact":
        raise CircuitError("apply_floquet_exact requires exact-mode params")
    if n < 0:
        raise CircuitError("step count must be >= 0")
    basis = state.basis
    if basis.L != params.L or basis.M != params.M:
        raise CircuitError("state sector does not match params")
    den_lcm = 1
    for p in state.coeffs:
        _, d = p.clear_denominators()
        den_lcm = den_lcm * d // math.gcd(den_lcm, d)
    evens, odds = [], []
    for p in state.coeffs:
        e, o = _poly_to_kernel(p, den_lcm)
        evens.append(e)
        odds.append(o)
    g1, g2, g3, c2 = _gate_scalars(params.q)
    tables = _gate_tables(params.L, params.M)
    # even and odd x-parity components evolve independently under even gate
    # polynomials but share denominator bookkeeping, so stack them pairwise
    dim = basis.dim
    polys = evens + odds
    ks = [0] * dim
    fast = _StackedState(polys, ks, dim)
    _evolve_stacked(fast, tables, g1, g2, g3, c2, n)
    K = max(ks) if ks else 0
    denom = GaussRat(c2) ** K * GaussRat(den_lcm)
    out = []
    for s in range(dim):
        e = _k_dpow(fast.polys[s], K - ks[s], g3, c2)
        o = _k_dpow(fast.polys[s + dim], K - ks[s], g3, c2)
        out.append(_kernel_to_poly(_k_trim(e), _k_trim(o), denom))
    return SectorState(basis, tuple(out)), K


class _StackedState:
    __slots__ = ("polys", "ks", "dim")

    def __init__(self, polys, ks, dim):
        self.polys = polys
        self.ks = ks
        self.dim = dim


def _evolve_stacked(state: _StackedState, tables, g1, g2, g3, c2, steps: int):
    polys, ks, dim = state.polys, state.ks, state.dim
    for _ in range(steps):
        for pairs in tables:
            for ia, ib in pairs:
                ea, eb = polys[ia], polys[ib]
                oa, ob = polys[ia + dim], polys[ib + dim]
                if _k_is_zero(ea) and _k_is_zero(eb) \
                        and _k_is_zero(oa) and _k_is_zero(ob):
                    continue
                ka, kb = ks[ia], ks[ib]
                k = max(ka, kb) + 1
                ta, tb = k - 1 - ka, k - 1 - kb
                ea = _k_dpow(ea, ta, g3, c2)
                oa = _k_dpow(oa, ta, g3, c2)
                eb = _k_dpow(eb, tb, g3, c2)
                ob = _k_dpow(ob, tb, g3, c2)
                polys[ia] = _k_add(_k_scale_shift(ea, g1, 1), _k_csub(eb, g2))
                polys[ib] = _k_add(_k_csub(ea, g2), _k_scale_shift(eb, g1, 1))
                polys[ia + dim] = _k_add(_k_scale_shift(oa, g1, 1), _k_csub(ob, g2))
                polys[ib + dim] = _k_add(_k_csub(oa, g2), _k_scale_shift(ob, g1, 1))
                ks[ia] = ks[ib] = k
    return state


# ---------------------------------------------------------------------------
# numeric evolution and sector matrices


def apply_floquet_numeric(vec, L: int, M: int, q, x, steps: int = 1):
    """Apply the Floquet operator to an mpc coefficient list, in place."""
    b, c = gate_values_numeric(q, x)
    tables = _gate_tables(L, M)
    for _ in range(steps):
        for pairs in tables:
            for ia, ib in pairs:
                va, vb = vec[ia], vec[ib]
                vec[ia] = b * va + c * vb
                vec[ib] = c * va + b * vb
    return vec


def floquet_matrix_numeric(params: CircuitParams, x0=None, dps: int = None):
    """Dense sector matrix of the one-step Floquet operator at numeric x0.

    Works in mpmath arithmetic at >= 64 significant digits.
    """
    from .config import default_matrix_dps
    dps = default_matrix_dps() if dps is None else max(64, dps)
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise CircuitError("floquet_matrix_numeric needs an evaluation point x0")
    basis = sector_basis(params.L, params.M)
    with workdps(dps):
        q = params.q_mpc()
        x = _as_mpc(x0)
        dim = basis.dim
        cols = []
        for j in range(dim):
            vec = [mpc(0)] * dim
            vec[j] = mpc(1)
            apply_floquet_numeric(vec, params.L, params.M, q, x, 1)
            cols.append(vec)
        A = mp.matrix(dim, dim)
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                A[i, j] = v
    return A
