"""Zero-condensation diagnostics for the complexified gate parameter.

Local unitarity predicts where eigenvalue branches are equimodular: for
real q (|Delta| > 1) the locus is the unit circle |x| = 1, for |q| = 1
(|Delta| < 1) it is the union of the real and imaginary axes.  This
module measures how the computed zero sets relate to those predictions:
distance-to-locus densities R, their scaling fit R = 1 - c eps^r,
symmetry closure of zero multisets, and a direct spectral scan that
locates dominance crossings of the sector eigenvalues.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np
from mpmath import mp, mpf, mpc, workdps

from .exactarith import GaussRat
from .circuit import (CircuitParams, CircuitError, sector_basis,
                      _gate_tables, gate_values_numeric,
                      floquet_matrix_numeric)


class DiagnosticsError(ValueError):
    """Raised for regime, grid, and fit contract violations."""


# ---------------------------------------------------------------------------
# predicted locus


@dataclass(frozen=True)
class UniversalLocus:
    """Predicted condensation locus for a spectral regime.

    regime 'massive' carries the unit circle, 'massless' the union of
    the coordinate axes.  distance(x) is the metric the density
    diagnostic uses; for the axes it is min(|Re x|, |Im x|), matching
    the fourfold rotation structure of the zero sets.
    """

    regime: str
    description: str

    def distance(self, x):
        z = mpc(x)
        if self.regime == "massive":
            return abs(abs(z) - 1)
        return min(abs(z.real), abs(z.imag))


def universal_locus(q) -> UniversalLocus:
    """Locus predicted by the regime of q; error outside both regimes."""
    if isinstance(q, CircuitParams):
        regime = q.regime
    else:
        try:
            qe = GaussRat.coerce(q)
        except Exception:
            qe = None
        if qe is not None:
            if qe.is_zero() or qe == GaussRat(1) or qe == GaussRat(-1):
                raise DiagnosticsError(
                    "q in {0, 1, -1} is a degenerate spectral point")
            regime = "massive" if qe.is_real() else \
                ("massless" if qe.norm2() == 1 else "other")
        else:
            qm = mpc(q)
            if min(abs(qm), abs(qm - 1), abs(qm + 1)) < mpf("1e-30"):
                raise DiagnosticsError(
                    "q in {0, 1, -1} is a degenerate spectral point")
            if abs(qm.imag) < mpf("1e-30"):
                regime = "massive"
            elif abs(abs(qm) - 1) < mpf("1e-30"):
                regime = "massless"
            else:
                regime = "other"
    if regime == "massive":
        return UniversalLocus("massive", "unit_circle")
    if regime == "massless":
        return UniversalLocus("massless", "real_axis+imaginary_axis")
    raise DiagnosticsError(
        "no predicted locus for generic complex q (need real q or |q| = 1)")


def circle_locus(radius) -> UniversalLocus:
    """Comparison locus |x| = radius; used to test that the data select
    the unit circle rather than a nearby one."""
    r = mpf(radius)
    if r <= 0:
        raise DiagnosticsError("circle radius must be positive")

    class _Circle(UniversalLocus):
        def distance(self, x):
            return abs(abs(mpc(x)) - r)

    return _Circle("massive", f"circle_{float(r)}")


# ---------------------------------------------------------------------------
# zero density


@dataclass(frozen=True)
class DensityReport:
    """Multiplicity-weighted fraction of zeros within eps of a locus."""

    delta: float
    eps: float
    n: int
    R: float
    total: int
    within: int
    locus: str = ""

    def to_json(self):
        return {"delta": self.delta, "eps": self.eps, "n": self.n,
                "R": self.R, "total": self.total, "within": self.within,
                "locus": self.locus}


def zero_density(zs, locus: UniversalLocus, eps, delta=None, n=None) \
        -> DensityReport:
    """Fraction of the zero multiset within distance eps of the locus."""
    if not zs.entries:
        raise DiagnosticsError("zero density needs a nonempty zero set")
    if not zs.valid:
        raise DiagnosticsError("zero set was flagged invalid by the finder")
    e = mpf(eps)
    if e < 0:
        raise DiagnosticsError("eps must be nonnegative")
    total = 0
    within = 0
    for entry in zs.entries:
        total += entry.multiplicity
        if locus.distance(entry.root) <= e:
            within += entry.multiplicity
    return DensityReport(float(delta) if delta is not None else float("nan"),
                         float(e), int(n) if n is not None else -1,
                         within / total, total, within, locus.description)


# ---------------------------------------------------------------------------
# scaling fit


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of R = 1 - c eps^r on log(1-R) vs log eps."""

    c: float
    r: float
    residual: float
    eps_grid: tuple
    excluded: tuple = ()
    degenerate: bool = False
    note: str = ""


def fit_density_scaling(reports) -> ScalingFit:
    """Fit the density model; R = 1 points are excluded with a note."""
    pts = []
    excluded = []
    for rep in reports:
        if rep.R >= 1.0:
            excluded.append(rep.eps)
        else:
            pts.append((rep.eps, rep.R))
    if not pts:
        raise DiagnosticsError("every report had R = 1; nothing to fit")
    eps_vals = sorted({e for e, _ in pts})
    if len(eps_vals) < 4:
        raise DiagnosticsError(
            f"need at least 4 distinct eps values with R < 1, got {len(eps_vals)}")
    lx = np.array([math.log(e) for e, _ in pts])
    ly = np.array([math.log(1.0 - R) for _, R in pts])
    A = np.stack([np.ones_like(lx), lx], axis=1)
    sol, *_ = np.linalg.lstsq(A, ly, rcond=None)
    logc, r = float(sol[0]), float(sol[1])
    c = math.exp(logc)
    resid = 0.0
    for e, R in pts:
        resid = max(resid, abs((1.0 - c * e ** r) - R))
    degenerate = bool(np.ptp(ly) < 1e-9 or abs(r) < 1e-9)
    note = ""
    if excluded:
        note = f"excluded {len(excluded)} saturated points (R = 1)"
    if degenerate:
        note = (note + "; " if note else "") + \
            "density is constant over the grid; exponent not identified"
    return ScalingFit(c, r, resid, tuple(eps_vals), tuple(excluded),
                      degenerate, note)


# ---------------------------------------------------------------------------
# symmetry closure


@dataclass(frozen=True)
class SymmetryReport:
    """Closure of the zero multiset under x -> ix and x -> conj(x)."""

    rotation_defect: float
    rotation_ok: bool
    conjugation_checked: bool
    conjugation_defect: float
    conjugation_ok: bool
    tol: float


def _pairing_defect(points, mults, images):
    """Worst distance from each image point to an original zero of the
    same multiplicity.  The tested maps send exact zero multisets to
    themselves bijectively, so nearest equal-multiplicity distance is
    the right defect for a closure report."""
    by_mult = {}
    for z, m in zip(points, mults):
        by_mult.setdefault(m, []).append(z)
    arrs = {m: np.array(v) for m, v in by_mult.items()}
    worst = 0.0
    for w, m in zip(images, mults):
        arr = arrs.get(m)
        if arr is None:
            return float("inf")
        worst = max(worst, float(np.min(np.abs(arr - w))))
    return worst


def symmetry_report(zs, params=None, q=None, tol=1e-12) -> SymmetryReport:
    """Test x -> ix closure always, x -> conj(x) when q is real."""
    if not zs.entries:
        raise DiagnosticsError("symmetry report needs a nonempty zero set")
    pts = [complex(e.root) for e in zs.entries]
    mults = [e.multiplicity for e in zs.entries]
    rot = _pairing_defect(pts, mults, [1j * z for z in pts])
    q_real = None
    if params is not None:
        q_real = params.regime == "massive"
    elif q is not None:
        try:
            q_real = GaussRat.coerce(q).is_real()
        except Exception:
            q_real = abs(complex(q).imag) < 1e-30
    conj_checked = bool(q_real)
    conj = _pairing_defect(pts, mults, [z.conjugate() for z in pts]) \
        if conj_checked else float("nan")
    return SymmetryReport(rot, rot <= tol, conj_checked, conj,
                          bool(conj_checked and conj <= tol), tol)


# ---------------------------------------------------------------------------
# equimodular scan


@dataclass(frozen=True)
class ScanGrid:
    """Evaluation points plus the adjacency used for crossing detection.

    points: complex evaluation points; segments: index pairs of adjacent
    points.  spacing is the largest adjacent-point distance, the length
    scale against which located crossings are judged.
    """

    points: tuple
    segments: tuple
    spacing: float
    kind: str = "custom"

    @staticmethod
    def cartesian(re_min, re_max, im_min, im_max, n_re, n_im,
                  r_min=None, r_max=None) -> "ScanGrid":
        if n_re < 2 or n_im < 2:
            raise DiagnosticsError("cartesian grid needs at least 2x2 points")
        res = np.linspace(re_min, re_max, n_re)
        ims = np.linspace(im_min, im_max, n_im)
        idx = {}
        pts = []
        for a, re in enumerate(res):
            for b, im in enumerate(ims):
                z = complex(re, im)
                if r_min is not None and abs(z) < r_min:
                    continue
                if r_max is not None and abs(z) > r_max:
                    continue
                idx[(a, b)] = len(pts)
                pts.append(z)
        segs = []
        for (a, b), i in idx.items():
            for nb in ((a + 1, b), (a, b + 1)):
                j = idx.get(nb)
                if j is not None:
                    segs.append((i, j))
        if not segs:
            raise DiagnosticsError("grid mask left no adjacent point pairs")
        spacing = max(abs(pts[i] - pts[j]) for i, j in segs)
        return ScanGrid(tuple(pts), tuple(segs), float(spacing), "cartesian")

    @staticmethod
    def polar(r_min, r_max, n_r, n_theta, center=0.0) -> "ScanGrid":
        if n_r < 2 or n_theta < 3:
            raise DiagnosticsError("polar grid needs n_r >= 2, n_theta >= 3")
        if not 0 < r_min < r_max:
            raise DiagnosticsError("polar grid needs 0 < r_min < r_max")
        rs = np.linspace(r_min, r_max, n_r)
        ths = [2 * math.pi * k / n_theta for k in range(n_theta)]
        pts = []
        for a, r in enumerate(rs):
            for b, th in enumerate(ths):
                pts.append(complex(center) + r * complex(math.cos(th),
                                                         math.sin(th)))
        segs = []
        for a in range(n_r):
            for b in range(n_theta):
                i = a * n_theta + b
                if a + 1 < n_r:
                    segs.append((i, (a + 1) * n_theta + b))
                segs.append((i, a * n_theta + (b + 1) % n_theta))
        spacing = max(abs(pts[i] - pts[j]) for i, j in segs)
        return ScanGrid(tuple(pts), tuple(segs), float(spacing), "polar")


@dataclass(frozen=True)
class ScanResult:
    """Located equimodularity and vanishing-weight points.

    equimodular: points where two distinct visible branches agree in
    modulus within gap_tol (crossing mechanism), located by minimizing
    the class-gap scalar along grid segments and confirmed at
    confirm_dps digits; a conjugate pair sharing one modulus along a
    symmetry ray qualifies by itself.  weight_zero: isolated points
    where the leading modulus group's overlap with the state falls
    below weight_tol (vanishing weight mechanism; includes exceptional
    points where the dying leading branch collides with others).
    skipped: (point, reason) pairs for failed evaluations, rejected
    confirmations, and budget overflow.
    """

    equimodular: tuple
    weight_zero: tuple
    skipped: tuple
    spacing: float
    gap_tol: float
    weight_tol: float
    confirm_dps: int


def _sector_matrix_f64(L, M, q, x):
    """Dense float64 sector matrix of the one-step operator."""
    b, c = gate_values_numeric(q, x)
    b, c = complex(b), complex(c)
    dim = sector_basis(L, M).dim
    A = np.eye(dim, dtype=complex)
    for pairs in _gate_tables(L, M):
        G = np.eye(dim, dtype=complex)
        for ia, ib in pairs:
            G[ia, ia] = b
            G[ib, ib] = b
            G[ia, ib] = c
            G[ib, ia] = c
        A = G @ A
    return A


# The sector spectrum carries exact degeneracies (momentum pairs related
# by reflection), so eigenvalues are grouped into equal-modulus classes
# and equimodularity means two DISTINCT classes touching.  A permanently
# degenerate pair acts as a single branch and creates no zeros.
_CLASS_REL_F64 = 1e-9
# Detector tolerance for the modulus-gap scalar: must absorb float64
# eigensolver noise on exactly equimodular groups (measured <= 5e-15
# relative on the benchmark sectors, amplified near dark degenerate
# groups) yet stay far below any transversal class separation, since
# it bounds how precisely a crossing can be localized.
_GAP_REL_F64 = 1e-10
# Members of one modulus class count as distinct branches only when
# their values separate beyond this: exact twins (reflection pairs)
# agree to eigensolver noise, conjugate pairs on a symmetry ray differ
# at order one.
_VALUE_SEP_F64 = 1e-6
# Weight detection clusters coarsely: near a multi-branch collision the
# individual overlap residues diverge while the cluster sum stays
# analytic, so only the summed weight of a near-degenerate group is a
# stable observable.
_COARSE_REL = 1e-3


def _eigs_f64(L, M, qc, z):
    return np.linalg.eigvals(_sector_matrix_f64(L, M, qc, z))


def _raw_gap_f64(lam, rel=_GAP_REL_F64, vsep=_VALUE_SEP_F64):
    """Relative modulus gap between the two largest distinct eigenvalue
    moduli, treating moduli within rel as one class.  0.0 when the whole
    spectrum is equimodular (local unitarity collapses every modulus to
    the same value) and when the leading class itself holds branches
    with distinct values, as on a conjugation-symmetric ray where a
    conjugate pair shares one modulus everywhere.  Equal-value members
    (reflection twins, exact collisions) are one branch, not a crossing.
    Continuous in z away from crossings; near a transversal crossing it
    falls linearly to the rel floor."""
    mods = np.abs(lam)
    m1 = float(mods.max())
    if m1 == 0.0:
        return 0.0
    top = lam[(m1 - mods) / m1 <= rel]
    if top.size > 1 and np.abs(top - top[0]).max() > vsep * m1:
        return 0.0
    below = mods[(m1 - mods) / m1 > rel]
    if below.size == 0:
        return 0.0
    return float((m1 - below.max()) / m1)


def _top_weight_f64(lam, w, rel=_COARSE_REL):
    """|combined overlap| of the largest-modulus coarse cluster.  Smooth
    through multi-branch collisions (the group sum is a projector trace)
    and vanishing exactly where the state cannot see the leading
    branch."""
    mods = np.abs(lam)
    m1 = float(mods.max())
    if m1 == 0.0:
        return 0.0
    sel = (m1 - mods) / m1 <= rel
    return float(abs(w[sel].sum()))


def _visible_gap_f64(lam, w, norm2, rel=_CLASS_REL_F64, dead=1e-8,
                     vsep=_VALUE_SEP_F64):
    """Relative modulus gap of the two leading classes the state can
    see, dropping classes whose combined overlap is numerically dead.
    0.0 when the leading visible class holds distinct-valued branches
    (already equimodular), math.inf when a single visible branch is
    left (nothing to cross), None when the float64 decomposition is
    untrustworthy and the point must go to full confirmation."""
    if abs(w.sum() - norm2) > 1e-2 * norm2:
        return None
    classes = _modulus_classes(lam, rel)
    kept = [c for c in classes if abs(w[c].sum()) > dead * norm2]
    if not kept:
        return None
    mods = np.abs(lam)
    m1 = float(max(mods[i] for i in kept[0]))
    if m1 == 0.0:
        return 0.0
    top = lam[kept[0]]
    if top.size > 1 and np.abs(top - top[0]).max() > vsep * m1:
        return 0.0
    if len(kept) < 2:
        return math.inf
    m2 = float(max(mods[i] for i in kept[1]))
    return (m1 - m2) / m1


def _golden_min(f, za, zb):
    """Golden-section minimum of f along the segment [za, zb]; returns
    (z_best, f_best).  The detector scalars are V-shaped at a crossing
    (kink, not smooth minimum), which golden section handles; when the
    scalar has a flat floor the bracket settles on the floor's edge,
    still within the floor width of the true crossing."""
    phi = (math.sqrt(5) - 1) / 2
    seg = zb - za
    tol = 1e-12 * (1 + abs(za) + abs(zb)) / max(abs(seg), 1e-300)
    a, b = 0.0, 1.0
    t1 = b - phi * (b - a)
    t2 = a + phi * (b - a)
    f1 = f(za + seg * t1)
    f2 = f(za + seg * t2)
    best_t, best_f = (t1, f1) if f1 <= f2 else (t2, f2)
    while b - a > tol:
        if f1 <= f2:
            b, t2, f2 = t2, t1, f1
            t1 = b - phi * (b - a)
            tb = t1
            f1 = fb = f(za + seg * t1)
        else:
            a, t1, f1 = t1, t2, f2
            t2 = a + phi * (b - a)
            tb = t2
            f2 = fb = f(za + seg * t2)
        if fb < best_f:
            best_t, best_f = tb, fb
    return za + seg * best_t, best_f


def _modulus_classes(lam, rel=_CLASS_REL_F64):
    """Indices grouped into equal-modulus classes, descending modulus."""
    mods = np.abs(lam)
    order = np.argsort(-mods)
    m1 = mods[order[0]]
    classes = []
    cur = [int(order[0])]
    last = m1
    for i in order[1:]:
        m = mods[i]
        if m1 > 0 and (last - m) / m1 > rel:
            classes.append(cur)
            cur = []
        cur.append(int(i))
        last = m
    classes.append(cur)
    return classes


def _gap_mp(params, z, dps, state=None, branch_tol=mpf("1e-30"), top_k=2):
    """Relative gap of the top two distinct visible modulus classes at
    multiprecision; 0 when all visible eigenvalues are equimodular or
    when the leading visible class carries distinct-valued branches
    (a conjugate pair on a symmetry ray is equimodular by itself).
    Exact degeneracies resolve to ~10^-dps and are clustered away, while
    a located crossing leaves a gap around the bisection width."""
    with workdps(dps):
        cluster = mpf(10) ** (-(dps // 2))
        if state is None:
            A = floquet_matrix_numeric(params, x0=mpc(z), dps=dps)
            lam = mp.eig(A, left=False, right=False)
            pairs = [(v, None) for v in lam]
        else:
            from .bethe import spectral_decomposition
            dec = spectral_decomposition(state, params, x0=mpc(z), dps=dps)
            pairs = list(dec.entries)
        pairs.sort(key=lambda e: -abs(e[0]))
        m1 = abs(pairs[0][0])
        if m1 == 0:
            return mpf(0)
        classes = []
        cur = [pairs[0]]
        last = m1
        for lam, w in pairs[1:]:
            m = abs(lam)
            if (last - m) / m1 > cluster:
                classes.append(cur)
                cur = []
            cur.append((lam, w))
            last = m
        classes.append(cur)
        if state is not None:
            kept = [c for c in classes
                    if abs(sum(w for _, w in c)) > branch_tol]
            if kept:
                classes = kept
        top = classes[0]
        if len(top) > 1 and max(abs(l - top[0][0]) for l, _ in top[1:]) \
                > cluster * abs(top[0][0]):
            return mpf(0)
        if len(classes) < top_k:
            return mpf(0)
        mtop = max(abs(l) for l, _ in classes[0])
        mk = max(abs(l) for l, _ in classes[top_k - 1])
        return (mtop - mk) / mtop


def _top_weight_mp(params, z, dps, state, rel=1e-2):
    """Normalized |combined overlap| of the leading eigenvalue group at
    multiprecision.  The group is cut coarsely (relative modulus within
    rel) so that a leading branch passing near a collision keeps its
    partners: individual near-degenerate residues diverge while the
    group sum stays bounded, and any genuinely distinct class sits more
    than rel below the top on the scanned sectors."""
    from .bethe import spectral_decomposition
    with workdps(dps):
        dec = spectral_decomposition(state, params, x0=mpc(z), dps=dps)
        m1 = max(abs(lam) for lam, _ in dec.entries)
        if m1 == 0:
            return mpf(0)
        wsum = mpc(0)
        for lam, w in dec.entries:
            if (m1 - abs(lam)) / m1 <= rel:
                wsum += w
        return abs(wsum) / mpf(state.norm2)


def equimodular_scan(params: CircuitParams, grid: ScanGrid, state=None,
                     gap_tol=1e-6, weight_tol=1e-6, branch_tol=1e-25,
                     top_k=2, confirm_dps=128, max_confirm=64) -> ScanResult:
    """Locate spectral dominance crossings and vanishing-weight points.

    The equimodular set of the sector spectrum is a curve, so generic
    grid points never satisfy gap_tol directly.  Every grid segment is
    sampled and two scalars are minimized along it:

    * the relative gap between the two largest distinct eigenvalue
      moduli, which vanishes exactly where two modulus classes cross
      (the equimodular mechanism), and
    * with a state, the normalized overlap of the leading modulus
      group, which vanishes where the state cannot see the leading
      branch (the vanishing-weight mechanism; zeros accumulate there
      although no visible crossing occurs).

    Sample runs already below the acceptance floor collapse to their
    best member (a segment lying on the curve yields one point, not
    twenty-five), remaining local minima are refined by golden section,
    and accepted candidates are confirmed at confirm_dps digits: a
    crossing must show a visible-class gap below gap_tol, a weight zero
    a leading-group overlap below weight_tol.  A modulus class counts
    as equimodular on its own when it carries branches with distinct
    values: on a conjugation-symmetric ray a conjugate pair shares one
    modulus along the whole ray, and such points are crossings even
    though no second class approaches.  Equal-value members (reflection
    twins, exact multi-branch collisions) are one branch and never form
    a crossing by themselves.

    With a state, two filters keep the two mechanisms honest.  Classes
    whose overlap is identically zero by symmetry are excluded
    pointwise from the confirmation gap, so a dark class crossing a
    visible one is rejected: it generates no zeros in this state's
    amplitude.  And a weight candidate must vanish on an isolated point
    or curve: where the leading group is dark on an open neighborhood
    no accumulation occurs, so candidates whose surroundings are dark
    in most directions are dropped before confirmation.

    branch_tol is the pointwise invisibility cut relative to the state
    norm: symmetry-forced zero overlaps evaluate many orders below it
    at confirm_dps digits, genuine small overlaps stay above.
    max_confirm caps the multiprecision confirmations, each of which
    costs seconds; surplus candidates are reported as skipped.
    """
    if params.mode != "float":
        params = CircuitParams(params.q_mpc(), params.L, params.M,
                               mode="float", x0=params.x0)
    qc = complex(params.q_mpc())
    L, M = params.L, params.M
    if sector_basis(L, M).dim < 2:
        raise DiagnosticsError(
            "equimodularity needs a sector of dimension at least 2")
    vec = None
    norm2 = 1.0
    if state is not None:
        vec = np.array([float(c) for c in state.sector_vector(M)])
        if not vec.any():
            raise DiagnosticsError("state has no weight in the scan sector")
        norm2 = float(state.norm2)
    mp_branch_tol = mpf(branch_tol) * mpf(norm2)

    def gap_at(z):
        lam = _eigs_f64(L, M, qc, z)
        if not np.all(np.isfinite(lam)):
            raise CircuitError("non-finite eigenvalues")
        return _raw_gap_f64(lam)

    def decomp_at(z):
        A = _sector_matrix_f64(L, M, qc, z)
        lam, R = np.linalg.eig(A)
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(R))):
            raise CircuitError("non-finite eigendecomposition")
        w = (vec @ R) * np.linalg.solve(R, vec)
        return lam, w

    def weight_at(z):
        lam, w = decomp_at(z)
        return _top_weight_f64(lam, w) / norm2

    def visible_gap_at(z):
        try:
            lam, w = decomp_at(z)
        except (CircuitError, np.linalg.LinAlgError):
            return None
        return _visible_gap_f64(lam, w, norm2)

    def isolated_zero(z, delta, wall):
        """True when the leading-group weight rises above wall in most
        directions around z: a vanishing point or transversal curve,
        not the interior or edge of a dark region."""
        high = 0
        for k in range(8):
            u = z + delta * complex(math.cos(math.pi * k / 4),
                                    math.sin(math.pi * k / 4))
            try:
                if weight_at(u) > wall:
                    high += 1
            except (CircuitError, np.linalg.LinAlgError):
                pass
        return high >= 6

    # Acceptance floors: the gap scalar bottoms out at its merge
    # tolerance _GAP_REL_F64, the weight scalar at golden-section width
    # times the local slope; both floors sit orders below any
    # non-vanishing local minimum observed on the benchmark sectors.
    accept_gap = 1e-8
    accept_w = 1e-9
    nsub = 24
    skipped = []

    def dips(vals, ts, za, zb, accept, refine_cut, evalf):
        """Candidate minima along one sampled segment: runs of samples
        below accept collapse to their best member, interior local
        minima below refine_cut are golden-refined and kept when they
        reach accept."""
        out = []
        n = len(vals) - 1
        k = 0
        while k <= n:
            if vals[k] <= accept:
                k2 = k
                while k2 + 1 <= n and vals[k2 + 1] <= accept:
                    k2 += 1
                kb = min(range(k, k2 + 1), key=lambda i: vals[i])
                out.append(za + (zb - za) * ts[kb])
                k = k2 + 1
                continue
            lo = vals[k - 1] if k > 0 else math.inf
            hi = vals[k + 1] if k < n else math.inf
            if vals[k] <= min(lo, hi) and vals[k] < refine_cut:
                a = za + (zb - za) * ts[max(k - 1, 0)]
                b = za + (zb - za) * ts[min(k + 1, n)]
                try:
                    zm, vm = _golden_min(evalf, a, b)
                except (CircuitError, np.linalg.LinAlgError):
                    zm, vm = None, math.inf
                if vm <= accept:
                    out.append(zm)
            k += 1
        return out

    ts = np.linspace(0.0, 1.0, nsub + 1)
    cand_gap = []
    cand_w = []
    for i, j in grid.segments:
        za, zb = grid.points[i], grid.points[j]
        try:
            svals = [gap_at(za + (zb - za) * t) for t in ts]
        except (CircuitError, np.linalg.LinAlgError) as exc:
            skipped.append(((za + zb) / 2, f"gap sampling failed: {exc}"))
        else:
            cut = max(0.3 * max(svals), 10 * accept_gap)
            cand_gap.extend(dips(svals, ts, za, zb, accept_gap, cut, gap_at))
        if vec is None:
            continue
        try:
            wvals = [weight_at(za + (zb - za) * t) for t in ts]
        except (CircuitError, np.linalg.LinAlgError) as exc:
            skipped.append(((za + zb) / 2, f"weight sampling failed: {exc}"))
            continue
        wmax = max(wvals)
        if wmax < 1e-5:
            # the leading group is symmetry-dark along the whole
            # segment; nothing vanishes at an isolated point here
            continue
        cand_w.extend(dips(wvals, ts, za, zb, accept_w, 0.3 * wmax,
                           weight_at))

    def dedup(points):
        out = []
        for z in points:
            if not any(abs(z - u) < 1e-9 for u in out):
                out.append(z)
        return out

    budget = max_confirm
    equim = []
    for z in dedup(cand_gap):
        if vec is not None:
            # one float64 decomposition rules out crossings the state
            # cannot see (a dark class meeting a visible one) without
            # spending a multiprecision confirmation on them
            vg = visible_gap_at(z)
            if vg is not None and vg > 1e-3:
                skipped.append((z, "crossing dark for this state"))
                continue
        if budget <= 0:
            skipped.append((z, "confirmation budget exhausted"))
            continue
        budget -= 1
        try:
            gap = _gap_mp(params, z, confirm_dps, state=state,
                          branch_tol=mp_branch_tol, top_k=top_k)
        except (CircuitError, ZeroDivisionError, ValueError) as exc:
            skipped.append((z, f"confirmation failed: {exc}"))
            continue
        if gap < mpf(gap_tol):
            equim.append(mpc(z))
        else:
            skipped.append((z, "crossing not visible at confirmation"))

    weight_zero = []
    if vec is not None:
        from .bethe import DefectiveMatrixError
        probe_delta = min(grid.spacing / 8, 0.02)
        for z in dedup(cand_w):
            if not isolated_zero(z, probe_delta, 1e-5):
                skipped.append((z, "leading group dark on a neighborhood"))
                continue
            if budget <= 0:
                skipped.append((z, "confirmation budget exhausted"))
                continue
            budget -= 1
            try:
                w1 = _top_weight_mp(params, z, confirm_dps, state)
            except (CircuitError, DefectiveMatrixError,
                    ZeroDivisionError, ValueError) as exc:
                skipped.append((z, f"confirmation failed: {exc}"))
                continue
            if w1 < mpf(weight_tol):
                weight_zero.append(mpc(z))
            else:
                skipped.append(
                    (z, "leading overlap not small at confirmation"))

    return ScanResult(tuple(equim), tuple(weight_zero), tuple(skipped),
                      grid.spacing, float(gap_tol), float(weight_tol),
                      int(confirm_dps))


# ---------------------------------------------------------------------------
# anisotropy sweep parametrization


def massive_q_for_delta(delta, exact=True, max_denominator=16):
    """q > 1 with (q + 1/q)/2 close to delta > 1.

    exact=True returns a small-denominator rational q as a GaussRat plus
    the anisotropy it realizes exactly; exact=False returns the float
    q = delta + sqrt(delta^2 - 1).
    """
    d = float(delta)
    if not d > 1:
        raise DiagnosticsError("massive sweep needs delta > 1")
    qf = d + math.sqrt(d * d - 1)
    if not exact:
        return mpf(qf), d
    fr = Fraction(qf).limit_denominator(max_denominator)
    if fr <= 1:
        fr = Fraction(qf).limit_denominator(4 * max_denominator)
        if fr <= 1:
            raise DiagnosticsError(
                f"no rational q > 1 near delta = {d} at this denominator cap")
    q = GaussRat(fr)
    delta_eff = float(fr + 1 / fr) / 2
    return q, delta_eff


def massless_q_for_delta(delta, max_denominator=16):
    """Unimodular Gaussian-rational q with Re q close to delta, |delta| < 1.

    Uses the Pythagorean parametrization q = (1 - t^2 + 2 t i)/(1 + t^2)
    with rational t, so q is exactly unimodular and the realized
    anisotropy is Re q.
    """
    d = float(delta)
    if not -1 < d < 1:
        raise DiagnosticsError("massless sweep needs -1 < delta < 1")
    t = math.sqrt((1 - d) / (1 + d))
    tr = Fraction(t).limit_denominator(max_denominator)
    if tr <= 0:
        tr = Fraction(1, max_denominator)
    num_re = 1 - tr * tr
    num_im = 2 * tr
    den = 1 + tr * tr
    q = GaussRat(num_re / den, num_im / den)
    return q, float(num_re / den)


def delta_sweep(deltas, L=8, M=2, n=100, eps=1e-2, state_kind="dwsym",
                locus_mode="auto", precision_digits=None,
                max_denominator=16, progress=None):
    """Zero-density curve R(Delta) across the transition.

    For each target anisotropy, picks an exact q in the matching regime
    (rational for delta > 1, unimodular Gaussian rational for delta < 1),
    computes the depth-n amplitude, extracts and certifies zeros, and
    measures the density against the locus.  locus_mode 'auto' uses each
    regime's own predicted locus; 'circle' or 'axes' fix one locus for
    every point.  Returns DensityReports sorted by realized anisotropy.
    """
    from .amplitude import build_initial_state, loschmidt_exact, \
        numerator_for_zeros
    from .rootfind import find_zeros, certify_zeros

    reports = []
    for target in deltas:
        t = float(target)
        if abs(t - 1.0) < 1e-12:
            raise DiagnosticsError(
                "delta = 1 is the degenerate point; sweep around it")
        if t > 1:
            q, deff = massive_q_for_delta(t, True, max_denominator)
        else:
            q, deff = massless_q_for_delta(t, max_denominator)
        params = CircuitParams(q, L, M)
        state = build_initial_state(state_kind, L, M)
        res = loschmidt_exact(state, params, n)
        zs = find_zeros(numerator_for_zeros(res), precision_digits)
        cert = certify_zeros(numerator_for_zeros(res), zs)
        if not cert.ok:
            raise DiagnosticsError(
                f"zero certification failed at delta ~ {deff}: {cert.note}")
        if locus_mode == "auto":
            locus = universal_locus(params)
        elif locus_mode == "circle":
            locus = UniversalLocus("massive", "unit_circle")
        elif locus_mode == "axes":
            locus = UniversalLocus("massless", "real_axis+imaginary_axis")
        else:
            raise DiagnosticsError(
                f"locus_mode must be auto/circle/axes, got {locus_mode!r}")
        rep = zero_density(zs, locus, eps, delta=deff, n=n)
        reports.append(rep)
        if progress is not None:
            progress(rep)
    reports.sort(key=lambda r: r.delta)
    return reports


# ---------------------------------------------------------------------------
# CSV interface


DENSITY_CSV_HEADER = ("delta", "eps", "n", "R")


def write_density_csv(path, reports):
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DENSITY_CSV_HEADER)
        for r in reports:
            w.writerow([repr(r.delta), repr(r.eps), r.n, repr(r.R)])


def read_density_csv(path):
    import csv
    out = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != DENSITY_CSV_HEADER:
            raise DiagnosticsError(f"unexpected density CSV header: {header}")
        for row in rd:
            d, e, n, R = float(row[0]), float(row[1]), int(row[2]), \
                float(row[3])
            out.append(DensityReport(d, e, n, R, -1, -1))
    return out
