"""Return amplitudes <Psi| U^n |Psi> as exact rational functions of x.

The supported product states have integer coefficients on magnon-number
sectors, so the amplitude of an exact-mode circuit is a quotient of
polynomials in x with Gaussian-rational coefficients.  The denominator
is always a unit times a power of the primitive part of q^2 x^4 - 1
(the only factor the evolution ever divides by); the reduction strips
fully cancelling powers and, should the numerator share only part of
that quartic, splits it into coprime factors.

Independent checks live here too: a structure-blind dense matrix-power
oracle over Gaussian rationals at a fixed point x0, and a multiprecision
floating oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpc, workdps

from .exactarith import (
    DensePoly,
    GaussRat,
    RationalFn,
    gauss_int_gcd,
    _gi_divexact,
    _gi_is_zero,
    _gi_mul,
    _gi_sub,
)
from .circuit import (
    CircuitParams,
    PoleError,
    _StackedState,
    _clear_q,
    _evolve_stacked,
    _gate_scalars,
    _gate_tables,
    _k_add,
    _k_dpow,
    _k_is_zero,
    _k_scale_shift,
    _k_trim,
    apply_floquet_numeric,
    sector_basis,
    site_bit,
)


class AmplitudeError(ValueError):
    pass


class AmplitudeZeroError(AmplitudeError):
    """The amplitude vanishes identically; the zero polynomial has no zero set."""


STATE_KINDS = ("dw", "dwsym", "dimer", "neel", "crosscap")


@dataclass(frozen=True)
class InitialState:
    """Unnormalized product state with integer coefficients per sector.

    sectors maps magnon number M to an integer coefficient tuple aligned
    with sector_basis(L, M).states.
    """

    kind: str
    L: int
    sectors: tuple  # ((M, coeff tuple), ...) ascending in M

    @property
    def norm2(self) -> int:
        return sum(c * c for _, vec in self.sectors for c in vec)

    @property
    def sector_numbers(self):
        return tuple(M for M, _ in self.sectors)

    def sector_vector(self, M: int):
        for m, vec in self.sectors:
            if m == M:
                return vec
        raise AmplitudeError(f"state has no weight in sector M={M}")

    def label(self) -> str:
        if self.kind in ("dw", "dwsym"):
            return f"{self.kind}{self.sector_numbers[0]}"
        return self.kind


def build_initial_state(kind: str, L: int, M: int = None) -> InitialState:
    """Construct one of the reference states.

    dw(M):    |1..1 0..0> with M magnons on sites 1..M (M required)
    dwsym(M): sum of the distinct two-site translates of dw(M); this is the
              domain-wall variant whose amplitude the reference tables and
              zero counts correspond to (the bare product state differs from
              them by more than a constant, e.g. it has D(n; 0) = 0 whenever
              the step count is not a multiple of the x=0 recurrence time)
    dimer:    product over blocks (2j-1, 2j) of (flip 2j-1 - flip 2j) on |0...0>
    neel:     magnons on the even sites, |0101...>
    crosscap: product over j <= L/2 of (1 + flip_j flip_{j+L/2}) on |0...0>
    """
    if L < 2 or L % 2:
        raise AmplitudeError(f"L must be even and >= 2, got {L}")
    kind = kind.lower()
    if kind in ("dw", "dwsym"):
        if M is None:
            raise AmplitudeError(f"{kind} state needs the magnon count M")
        if not 0 <= M <= L:
            raise AmplitudeError(f"{kind} magnon count must lie in 0..L, got {M}")
        mask = ((1 << M) - 1) << (L - M)
        basis = sector_basis(L, M)
        vec = [0] * basis.dim
        if kind == "dw":
            vec[basis.index_of(mask)] = 1
        else:
            full = (1 << L) - 1
            seen = set()
            m = mask
            for _ in range(L // 2):
                if m not in seen:
                    seen.add(m)
                    vec[basis.index_of(m)] = 1
                m = ((m >> 2) | (m << (L - 2))) & full
        return InitialState(kind, L, ((M, tuple(vec)),))
    if M is not None:
        raise AmplitudeError(f"state {kind!r} does not take an M argument")
    half = L // 2
    if kind == "neel":
        mask = sum(1 << site_bit(L, j) for j in range(2, L + 1, 2))
        basis = sector_basis(L, half)
        vec = [0] * basis.dim
        vec[basis.index_of(mask)] = 1
        return InitialState("neel", L, ((half, tuple(vec)),))
    if kind == "dimer":
        basis = sector_basis(L, half)
        vec = [0] * basis.dim
        for choice in range(1 << half):
            mask = 0
            sign = 1
            for j in range(1, half + 1):
                if (choice >> (j - 1)) & 1:
                    mask |= 1 << site_bit(L, 2 * j)
                    sign = -sign
                else:
                    mask |= 1 << site_bit(L, 2 * j - 1)
            vec[basis.index_of(mask)] += sign
        return InitialState("dimer", L, ((half, tuple(vec)),))
    if kind == "crosscap":
        per_m = {}
        for choice in range(1 << half):
            mask = 0
            m = 0
            for j in range(1, half + 1):
                if (choice >> (j - 1)) & 1:
                    mask |= 1 << site_bit(L, j)
                    mask |= 1 << site_bit(L, j + half)
                    m += 2
            per_m.setdefault(m, []).append(mask)
        sectors = []
        for m in sorted(per_m):
            basis = sector_basis(L, m)
            vec = [0] * basis.dim
            for mask in per_m[m]:
                vec[basis.index_of(mask)] += 1
            sectors.append((m, tuple(vec)))
        return InitialState("crosscap", L, tuple(sectors))
    raise AmplitudeError(f"unknown state kind {kind!r}; choose from {STATE_KINDS}")


# ---------------------------------------------------------------------------
# exact amplitude


@dataclass(frozen=True)
class AmplitudeResult:
    """Reduced amplitude D(n; x) = num / prod(factor^e), factors monic, coprime
    to num.  num_primitive is the content-1 Gaussian-integer presentation of
    the numerator and unit the GaussRat scalar with num = unit * num_primitive.
    """

    params: CircuitParams
    state: InitialState
    n: int
    num: DensePoly
    den_factors: tuple  # ((DensePoly monic factor, exponent), ...)
    num_primitive: DensePoly
    unit: GaussRat
    ledger_k: int

    @property
    def numerator_degree(self) -> int:
        return self.num.degree

    @property
    def x4_support(self) -> bool:
        stride = self.num.support_stride()
        return stride > 0 and stride % 4 == 0

    def den_poly(self) -> DensePoly:
        out = DensePoly.constant(1)
        for f, e in self.den_factors:
            out = out * f ** e
        return out

    def reduced(self) -> RationalFn:
        return RationalFn(self.num, self.den_poly(), reduce=False)

    def evaluate(self, x0):
        x0 = GaussRat.coerce(x0)
        dv = GaussRat(1)
        for f, e in self.den_factors:
            fv = f.evaluate(x0)
            if fv.is_zero():
                raise PoleError("amplitude evaluated at a denominator zero")
            dv = dv * fv ** e
        return self.num.evaluate(x0) / dv

    def to_json(self):
        return {
            "state": self.state.label(),
            "L": self.params.L,
            "n": self.n,
            "q": GaussRat.coerce(self.params.q).as_str_pair(),
            "numerator_degree": self.numerator_degree,
            "x4_support": self.x4_support,
            "ledger_k": self.ledger_k,
            "unit": self.unit.as_str_pair(),
            "num_primitive": self.num_primitive.to_json(),
            "den_factors": [
                {"factor": f.to_json(), "exponent": e} for f, e in self.den_factors
            ],
        }


def _zi_div_exact(num, den):
    """Exact division of Z[i] coefficient pair-lists; None when inexact."""
    dd = len(den) - 1
    lc = den[-1]
    work = list(num)
    if len(work) - 1 < dd:
        return None
    q = [(0, 0)] * (len(work) - dd)
    for k in range(len(work) - dd - 1, -1, -1):
        c = work[k + dd]
        if _gi_is_zero(c):
            continue
        try:
            qc = _gi_divexact(c, lc)
        except Exception:
            return None
        q[k] = qc
        for t, dc in enumerate(den):
            work[k + t] = _gi_sub(work[k + t], _gi_mul(qc, dc))
    if any(not _gi_is_zero(c) for c in work[:dd]):
        return None
    return q


def _pairs_content(pairs):
    g = (0, 0)
    for c in pairs:
        if not _gi_is_zero(c):
            g = gauss_int_gcd(g, c)
            if g == (1, 0):
                break
    return g


def _quadratic_remainder(pairs, g3, c2):
    """Fraction-free remainder of sum a_k y^k modulo g3 y^2 - c2.

    Returns (A, B) Gaussian ints with N == (A + B y) / g3^m modulo the
    quadratic, m = floor(deg/2); only the (non)vanishing pattern matters.
    """
    mdeg = (len(pairs) - 1) // 2 if pairs else 0
    A = (0, 0)
    B = (0, 0)
    # scale so even exponent 2t contributes a * c2^t * g3^(m - t)
    pow_c = [(1, 0)] * (mdeg + 1)
    pow_g = [(1, 0)] * (mdeg + 1)
    for t in range(1, mdeg + 1):
        pow_c[t] = _gi_mul(pow_c[t - 1], (c2, 0))
        pow_g[t] = _gi_mul(pow_g[t - 1], g3)
    for e, a in enumerate(pairs):
        if _gi_is_zero(a):
            continue
        t = e // 2
        term = _gi_mul(a, _gi_mul(pow_c[t], pow_g[mdeg - t]))
        if e % 2 == 0:
            A = (A[0] + term[0], A[1] + term[1])
        else:
            B = (B[0] + term[0], B[1] + term[1])
    return A, B


def _kernel_pairs(poly):
    """Kernel (re, im) lists -> list of Gaussian-int pairs, trimmed."""
    re, im = _k_trim(poly)
    if im is None:
        return [(a, 0) for a in re]
    return list(zip(re, im))


def _pairs_to_dense(pairs, inflate=1):
    p = DensePoly([GaussRat(a, b) for a, b in pairs])
    return p.inflate(inflate) if inflate > 1 and not p.is_zero() else p


def _canonical_unit(pairs):
    """Z[i] unit u putting the anchor coefficient (constant term, else leading)
    on the positive real axis when possible, else in the right half plane."""
    anchor = next((c for c in pairs if not _gi_is_zero(c)), None)
    if anchor is None:
        return (1, 0)
    units = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    for u in units:
        r, i = _gi_mul(anchor, u)
        if i == 0 and r > 0:
            return u
    lead = next(c for c in reversed(pairs) if not _gi_is_zero(c))
    for u in units:
        r, i = _gi_mul(lead, u)
        if i == 0 and r > 0:
            return u
    for u in units:
        r, i = _gi_mul(anchor, u)
        if r > 0 or (r == 0 and i > 0):
            return u
    return (1, 0)


def loschmidt_exact(state: InitialState, params: CircuitParams, n: int) -> AmplitudeResult:
    """Exact reduced amplitude <Psi| U^n |Psi> as a rational function of x."""
    if params.mode != "exact":
        raise AmplitudeError(
            "loschmidt_exact requires exact-mode params; use loschmidt_numeric "
            "for float-mode parameters")
    if n < 0:
        raise AmplitudeError("step count must be >= 0")
    if params.L != state.L:
        raise AmplitudeError("params.L does not match the state")
    if len(state.sectors) == 1 and params.M != state.sectors[0][0]:
        raise AmplitudeError(
            f"params.M={params.M} but the state lives in M={state.sectors[0][0]}")
    g1, g2, g3, c2 = _gate_scalars(params.q)
    sector_nums = []
    sector_ks = []
    for M, psi in state.sectors:
        tables = _gate_tables(params.L, M)
        polys = [([c], None) if c else ([], None) for c in psi]
        ks = [0] * len(psi)
        dim = len(psi)
        # integer input coefficients have no odd-in-x part, and the gates act
        # through even polynomials in y = x^2, so the odd stack stays zero
        stacked = _StackedState(polys + [([], None)] * dim, ks, dim)
        _evolve_stacked(stacked, tables, g1, g2, g3, c2, n)
        k_dot = 0
        for s, c in enumerate(psi):
            if c and not _k_is_zero(stacked.polys[s]):
                k_dot = max(k_dot, ks[s])
        acc = ([], None)
        for s, c in enumerate(psi):
            if not c or _k_is_zero(stacked.polys[s]):
                continue
            v = _k_dpow(stacked.polys[s], k_dot - ks[s], g3, c2)
            acc = _k_add(acc, _k_scale_shift(v, (c, 0), 0))
        sector_nums.append(acc)
        sector_ks.append(k_dot)
    K = max(sector_ks) if sector_ks else 0
    total = ([], None)
    for num, k in zip(sector_nums, sector_ks):
        total = _k_add(total, _k_dpow(num, K - k, g3, c2))
    pairs = _kernel_pairs(total)
    return _reduce_amplitude(pairs, K, params, state, n, g3, c2)


def _reduce_amplitude(pairs, K, params, state, n, g3, c2) -> AmplitudeResult:
    if not pairs:
        return AmplitudeResult(
            params=params, state=state, n=n,
            num=DensePoly(), den_factors=(),
            num_primitive=DensePoly(), unit=GaussRat(1), ledger_k=K)
    # D(y) = g3 y^2 - c2 = content_d * dP(y), dP primitive
    d_pairs = [(-c2, 0), (0, 0), g3]
    content_d = gauss_int_gcd(gauss_int_gcd((0, 0), g3), (c2, 0))
    dp = [_gi_divexact(c, content_d) for c in d_pairs]
    content_n = _pairs_content(pairs)
    work = [_gi_divexact(c, content_n) for c in pairs]
    j = 0
    while j < K:
        quo = _zi_div_exact(work, dp)
        if quo is None:
            break
        work = quo
        j += 1
    rem_power = K - j
    factors = []  # (primitive Z[i] pair-list in y, exponent)
    if rem_power > 0:
        A, B = _quadratic_remainder(work, g3, c2)
        lin = None
        if not _gi_is_zero(B):
            # shared linear factor requires g3 A^2 == c2 B^2
            lhs = _gi_mul(g3, _gi_mul(A, A))
            rhs = _gi_mul((c2, 0), _gi_mul(B, B))
            if lhs == rhs:
                cont = gauss_int_gcd(A, B)
                lin = [_gi_divexact(A, cont), _gi_divexact(B, cont)]
        if lin is not None:
            t = 0
            while t < rem_power:
                quo = _zi_div_exact(work, lin)
                if quo is None:
                    break
                work = quo
                t += 1
            other = _cofactor_linear(dp, lin)
            if rem_power - t > 0:
                factors.append((lin, rem_power - t))
            factors.append((other, rem_power))
        else:
            factors.append((dp, rem_power))
    # canonical unit on the numerator's primitive presentation
    u = _canonical_unit(work)
    work = [_gi_mul(c, u) for c in work]
    num_primitive = _pairs_to_dense(work, inflate=2)
    # amplitude = content_n/(content_d^K) * (work/u) / prod(primitive factors)
    # switch to monic denominator factors and fold all scalars into `unit`
    unit = GaussRat(content_n[0], content_n[1]) \
        / (GaussRat(content_d[0], content_d[1]) ** K) / GaussRat(u[0], u[1])
    den_factors = []
    for fac, e in factors:
        fpoly = _pairs_to_dense(fac, inflate=2)
        lead = fpoly.leading()
        den_factors.append((fpoly.monic(), e))
        unit = unit / lead ** e
    num = num_primitive * unit
    return AmplitudeResult(
        params=params, state=state, n=n,
        num=num, den_factors=tuple(den_factors),
        num_primitive=num_primitive, unit=unit, ledger_k=K)


def _cofactor_linear(dp, lin):
    """dp / lin for quadratic dp and linear lin over Z[i], primitive result."""
    quo = _zi_div_exact(dp, lin)
    if quo is None:
        # clear the rational cofactor: lc(lin)*dp / lin is integral
        scaled = [_gi_mul(c, lin[-1]) for c in dp]
        quo = _zi_div_exact(scaled, lin)
        if quo is None:
            raise AmplitudeError("internal factor split failed")
    cont = _pairs_content(quo)
    return [_gi_divexact(c, cont) for c in quo]


def numerator_for_zeros(result: AmplitudeResult) -> DensePoly:
    """Primitive numerator polynomial whose roots are the amplitude zeros.

    Raises AmplitudeZeroError for an identically vanishing amplitude.
    """
    if result.num.is_zero():
        raise AmplitudeZeroError(
            "amplitude vanishes identically; the zero polynomial has no zeros")
    return result.num_primitive


# ---------------------------------------------------------------------------
# independent oracles


def loschmidt_point_exact(state: InitialState, params: CircuitParams, x0, n: int) -> GaussRat:
    """Dense matrix-power oracle at Gaussian-rational x0.

    Structure-blind: applies every gate with cleared Gaussian-integer
    scalars and a global denominator power per gate, with no support
    tracking or polynomial bookkeeping.
    """
    if params.mode != "exact":
        raise AmplitudeError("loschmidt_point_exact requires exact-mode params")
    x0 = GaussRat.coerce(x0)
    (aq, bq), cq = _clear_q(params.q)
    den_x = math.lcm(x0.re.denominator, x0.im.denominator)
    xi = (int(x0.re * den_x), int(x0.im * den_x))
    q2 = (aq * aq - bq * bq, 2 * aq * bq)
    cq2 = cq * cq
    X2 = _gi_mul(xi, xi)
    X4 = _gi_mul(X2, X2)
    cx2 = den_x * den_x
    cx4 = cx2 * cx2
    BI = _gi_mul(_gi_sub(q2, (cq2, 0)), _gi_mul(X2, (cx2, 0)))
    CI = _gi_mul((cq * aq, cq * bq), _gi_sub(X4, (cx4, 0)))
    DI = _gi_sub(_gi_mul(q2, X4), (cq2 * cx4, 0))
    if _gi_is_zero(DI):
        raise PoleError("q^2 x0^4 - 1 vanishes at the requested point")
    num = (0, 0)
    for M, psi in state.sectors:
        tables = _gate_tables(params.L, M)
        vec = [(c, 0) for c in psi]
        for _ in range(n):
            for pairs in tables:
                touched = [False] * len(vec)
                for ia, ib in pairs:
                    va, vb = vec[ia], vec[ib]
                    pa = _gi_mul(BI, va)
                    pb = _gi_mul(CI, vb)
                    qa = _gi_mul(CI, va)
                    qb = _gi_mul(BI, vb)
                    vec[ia] = (pa[0] + pb[0], pa[1] + pb[1])
                    vec[ib] = (qa[0] + qb[0], qa[1] + qb[1])
                    touched[ia] = touched[ib] = True
                for s in range(len(vec)):
                    if not touched[s]:
                        vec[s] = _gi_mul(DI, vec[s])
        acc = (0, 0)
        for c, v in zip(psi, vec):
            if c:
                acc = (acc[0] + c * v[0], acc[1] + c * v[1])
        num = (num[0] + acc[0], num[1] + acc[1])
    gates_total = n * len(_gate_tables(params.L, 0))
    den = GaussRat(DI[0], DI[1]) ** gates_total
    return GaussRat(num[0], num[1]) / den


def loschmidt_numeric(state: InitialState, params: CircuitParams, x0=None,
                      n: int = 1, dps: int = None):
    """Multiprecision amplitude by repeated matrix-vector application."""
    from .config import default_matrix_dps
    dps = default_matrix_dps() if dps is None else max(64, dps)
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise AmplitudeError("loschmidt_numeric needs an evaluation point x0")
    if params.L != state.L:
        raise AmplitudeError("params.L does not match the state")
    with workdps(dps):
        q = params.q_mpc()
        x = x0.to_mpc() if isinstance(x0, GaussRat) else mpc(x0)
        total = mpc(0)
        for M, psi in state.sectors:
            vec = [mpc(c) for c in psi]
            apply_floquet_numeric(vec, params.L, M, q, x, n)
            total += mp.fsum(c * v for c, v in zip(psi, vec) if c)
        return total
