"""Certified multiprecision root extraction for dense polynomials.

Pipeline: strip roots at the origin, split into square-free factors
(constant-time modular test first, exact decomposition only when the
test finds repeated roots), deflate each factor through its monomial
support stride y = x^g, locate the deflated roots by simultaneous
Aberth iteration at low precision, lift every root by Newton steps at
doubling precision, and certify with the inclusion-disk bound
deg * |f(z)/f'(z)| evaluated with an explicit floating-point error
term.  Roots of the original polynomial are recovered as exact g-th
root fans of the deflated roots, with radii transported through the
root map.

Certified radii are honest upper bounds: coefficient conversion and
Horner rounding enter through a sum-of-absolute-values term, never
dropped.  A set that fails to converge is returned flagged invalid,
never silently as valid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpc, mpf, workdps

from .config import default_rootfind_dps
from .exactarith import DensePoly, GaussRat, squarefree_decompose


class ZerosError(ValueError):
    """Invalid input to the root finder."""


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class ZeroEntry:
    """One located root: value, multiplicity, certified radius, residual.

    radius bounds the distance to a true root of the source polynomial;
    residual is an upper bound on |p(root)| / max_k |p_k|.
    """

    root: object
    multiplicity: int
    radius: object
    residual: object


@dataclass(frozen=True)
class ZeroSet:
    """Roots of one polynomial, sorted by (arg, modulus)."""

    entries: tuple
    degree: int
    precision: int
    valid: bool = True
    note: str = ""
    label: str = ""

    def count(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def max_radius(self):
        return max((e.radius for e in self.entries), default=mpf(0))

    def max_residual(self):
        return max((e.residual for e in self.entries), default=mpf(0))

    def to_json(self):
        return {
            "degree": self.degree,
            "precision": self.precision,
            "valid": self.valid,
            "note": self.note,
            "label": self.label,
            "count": self.count(),
            "entries": [
                [mp.nstr(mpc(e.root).real, 30), mp.nstr(mpc(e.root).imag, 30),
                 e.multiplicity, mp.nstr(e.radius, 6), mp.nstr(e.residual, 6)]
                for e in self.entries
            ],
        }


CSV_HEADER = ("re_x", "im_x", "multiplicity", "abs_x", "residual")


def write_zeros_csv(path, zs: ZeroSet, digits: int = 24):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for e in zs.entries:
            z = mpc(e.root)
            w.writerow([mp.nstr(z.real, digits), mp.nstr(z.imag, digits),
                        e.multiplicity, mp.nstr(abs(z), digits),
                        mp.nstr(e.residual, 8)])


def read_zeros_csv(path):
    """Rows of (re, im, multiplicity, abs, residual) as Python floats/ints."""
    out = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != CSV_HEADER:
            raise ZerosError(f"unexpected csv header {header!r}")
        for row in rd:
            out.append((float(row[0]), float(row[1]), int(row[2]),
                        float(row[3]), float(row[4])))
    return out


# ---------------------------------------------------------------------------
# square-free split

# primes = 1 mod 4 admit a square root of -1, so Z[i] coefficients reduce
# into the prime field directly
_SF_PRIMES = (998244353, 1000000009)


def _sqrt_minus_one(p):
    for a in range(2, 1000):
        r = pow(a, (p - 1) // 4, p)
        if r * r % p == p - 1:
            return r
    raise RuntimeError(f"no sqrt(-1) mod {p}")


_SF_ROOTS = {p: _sqrt_minus_one(p) for p in _SF_PRIMES}


def _gcd_degree_mod(ints, prime, r):
    """deg gcd(p, p') over F_prime, or None if the reduction degenerates."""
    cs = [(a + b * r) % prime for a, b in ints]
    if cs[-1] == 0:
        return None
    d = len(cs) - 1
    dcs = [k * c % prime for k, c in enumerate(cs)][1:]
    a, b = cs, dcs

    def deg(v):
        i = len(v) - 1
        while i >= 0 and v[i] == 0:
            i -= 1
        return i

    da, db = deg(a), deg(b)
    if db < 0:
        return da
    while True:
        # a mod b
        inv = pow(b[db], prime - 2, prime)
        rem = a[:]
        for k in range(da, db - 1, -1):
            c = rem[k] * inv % prime
            if c:
                off = k - db
                for j in range(db + 1):
                    rem[off + j] = (rem[off + j] - c * b[j]) % prime
        dr = deg(rem)
        if dr < 0:
            return db
        a, da = b, db
        b, db = rem[:dr + 1], dr
        if db == 0:
            return 0


def _is_squarefree(p: DensePoly):
    """True/False via modular gcds; None when every prime is degenerate."""
    ints, _ = p.clear_denominators()
    verdict = None
    for prime in _SF_PRIMES:
        d = _gcd_degree_mod(ints, prime, _SF_ROOTS[prime])
        if d == 0:
            return True
        if d is not None:
            verdict = False
    return verdict


# ---------------------------------------------------------------------------
# numeric kernels


class _MpPoly:
    """Exact coefficients with cached mpc conversions per precision."""

    def __init__(self, poly: DensePoly):
        self.poly = poly
        self.degree = poly.degree
        self._cache = {}

    def at(self, dps):
        arr = self._cache.get(dps)
        if arr is None:
            with workdps(dps):
                arr = [c.to_mpc() for c in self.poly.coeffs]
            self._cache[dps] = arr
        return arr


def _horner2(cs, z):
    v = mpc(0)
    dv = mpc(0)
    for c in reversed(cs):
        dv = dv * z + v
        v = v * z + c
    return v, dv


def _horner_abs(cs, az):
    acc = mpf(0)
    for c in reversed(cs):
        acc = acc * az + abs(c)
    return acc


def _initial_guesses(cs, d):
    """Starting points from the Newton polygon of the coefficients.

    The upper convex hull of (k, log|a_k|) splits the circle of root
    moduli: each hull edge of horizontal span m contributes m points on
    the circle whose radius balances the two endpoint terms.  Far better
    matched to wide modulus ranges than a single circle.
    """
    pts = []
    for k, c in enumerate(cs):
        if c != 0:
            pts.append((k, float(mp.log(abs(c)))))
    hull = []
    for kp in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (kp[0] - x1) <= (kp[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(kp)
    out = []
    two_pi = 2 * mp.pi
    for (k1, h1), (k2, h2) in zip(hull, hull[1:]):
        m = k2 - k1
        r = mp.exp(mpf(h1 - h2) / m)
        for j in range(m):
            ang = two_pi * j / m + mpf("0.7737") + two_pi * k1 / d
            out.append(r * mp.exp(mpc(0, ang)))
    return out


# Aberth only has to deliver one seed per root basin; Newton lifting and
# certification carry the accuracy guarantees.  Root spacings of interest
# are far above this, and evaluation noise below it forces escalation.
_SEED_TOL = mpf("1e-30")


def _aberth_stage(cs, dps, roots, max_sweeps):
    """Jacobi-synchronized sweeps at fixed precision from given guesses.

    Returns (roots, converged).  The pairwise repulsion sum runs in
    float64 when representable (the root moduli of interest are O(1));
    otherwise it falls back to working-precision arithmetic.  Roots
    whose step stayed below the seed tolerance twice are frozen, which
    keeps late sweeps cheap.  Deterministic: fixed order, synchronized
    updates.
    """
    d = len(cs) - 1
    with workdps(dps):
        settled = [0] * d
        best = mpf("inf")
        since_best = 0
        for _ in range(max_sweeps):
            ssum = None
            zf = np.array([complex(z) for z in roots])
            if np.all(np.isfinite(zf)):
                diff = zf[:, None] - zf[None, :]
                np.fill_diagonal(diff, 1.0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                s = inv.sum(axis=1)
                if np.all(np.isfinite(s)):
                    ssum = [mpc(v) for v in s]
            if ssum is None:
                ssum = []
                for j in range(d):
                    acc = mpc(0)
                    zj = roots[j]
                    for k in range(d):
                        if k != j:
                            dz = zj - roots[k]
                            if dz == 0:
                                dz = mpf(10) ** (-dps)
                            acc += 1 / dz
                    ssum.append(acc)
            maxstep = mpf(0)
            new = []
            for j, z in enumerate(roots):
                if settled[j] >= 2:
                    new.append(z)
                    continue
                v, dv = _horner2(cs, z)
                if v == 0:
                    new.append(z)
                    settled[j] += 1
                    continue
                if dv == 0:
                    new.append(z * (1 + mpf("1e-6")) + mpf("1e-6"))
                    maxstep = max(maxstep, mpf(1))
                    continue
                w = v / dv
                den = 1 - w * ssum[j]
                step = w if den == 0 else w / den
                rel = abs(step) / (1 + abs(z))
                settled[j] = settled[j] + 1 if rel < _SEED_TOL else 0
                maxstep = max(maxstep, rel)
                new.append(z - step)
            roots = new
            if maxstep < _SEED_TOL or all(c >= 2 for c in settled):
                return roots, True
            # a stage stuck at its evaluation-noise floor cannot improve;
            # hand the current positions to the next precision stage
            if maxstep < best / 2:
                best = maxstep
                since_best = 0
            else:
                since_best += 1
                if since_best >= 25:
                    return roots, False
        return roots, False


def _aberth(mpoly: _MpPoly, target_dps, max_sweeps=150):
    """Locate all roots of a square-free polynomial to seed accuracy.

    Precision escalates 64 -> 128 -> ... -> target+16 between stage
    restarts; heavy interior-coefficient cancellation (the benchmark
    numerators reach 1e245 against end coefficients of 1e90) makes low
    precision pure noise near parts of the root ring, and escalation is
    how stalled stages recover.  The working precision a polynomial
    needs is set by its own cancellation, not by the requested root
    accuracy, so when the target stage still stalls the escalation
    keeps doubling until convergence or a hard cap well past any
    observed demand.  Returns (roots, converged, stage_dps).
    """
    d = mpoly.degree
    if d == 1:
        cs = mpoly.at(64)
        return [-cs[0] / cs[1]], True, 64
    stages = [64]
    cap = max(1024, 4 * (target_dps + 16))
    while stages[-1] < target_dps + 16:
        stages.append(min(2 * stages[-1], target_dps + 16))
    while stages[-1] < cap:
        stages.append(min(2 * stages[-1], cap))
    roots = None
    for dps in stages:
        cs = mpoly.at(dps)
        if roots is None:
            with workdps(dps):
                roots = _initial_guesses(cs, d)
        roots, ok = _aberth_stage(cs, dps, roots, max_sweeps)
        if ok:
            return roots, True, dps
    return roots, False, stages[-1]


def _lift_root(mpoly: _MpPoly, z0, target_dps, start_dps):
    """Newton-refine one root at doubling precision.

    Returns (root, dps) where dps is the precision at which the Newton
    correction |p/p'| passed the target accuracy check, or None on
    failure.  start_dps is the precision at which the seed was
    obtained; starting lower would make the first Newton steps pure
    evaluation noise and could throw the iterate out of its basin.
    Coefficient cancellation plus root conditioning set how many
    working digits the check needs, so on a failed check the precision
    keeps doubling rather than giving up at the nominal target.
    """
    hi = max(target_dps + 16, start_dps)
    cap = max(1024, 4 * hi)
    # the certified radius carries a factor of the degree on top of the
    # Newton correction, so the check must clear the radius cap with
    # that factor to spare
    tol = mpf(10) ** (-(target_dps // 2)) / (8 * mpoly.degree)
    z = z0
    dps = max(start_dps, 52)
    while True:
        cs = mpoly.at(dps)
        with workdps(dps + 10):
            for _ in range(4):
                v, dv = _horner2(cs, z)
                if dv == 0:
                    return None
                step = v / dv
                z = z - step
                if abs(step) <= mpf(10) ** (-dps + 8) * (1 + abs(z)):
                    break
        if dps >= hi:
            with workdps(dps):
                v, dv = _horner2(cs, z)
                if dv != 0 and abs(v / dv) <= tol:
                    return z, dps
            if dps >= cap:
                return None
        dps = min(2 * dps, hi if dps < hi else cap)


def _certified_eval(mpoly: _MpPoly, z, dps):
    """(value, derivative, evaluation error bound) at precision dps."""
    cs = mpoly.at(dps)
    with workdps(dps):
        v, dv = _horner2(cs, z)
        err = _horner_abs(cs, abs(z)) * mpf(10) ** (6 - dps)
    return v, dv, err


# ---------------------------------------------------------------------------
# driver


def find_zeros(p: DensePoly, precision_digits: int = None,
               label: str = "") -> ZeroSet:
    """All complex roots of p with multiplicities and certified radii.

    Each returned radius is below 10^(-precision_digits/2) when the set
    is valid; a factor that fails to converge flags the whole set
    invalid with a note instead of raising.
    """
    if not isinstance(p, DensePoly):
        p = DensePoly(p)
    if p.is_zero() or p.degree < 1:
        raise ZerosError("root finding needs a nonzero nonconstant polynomial")
    precision = default_rootfind_dps(p.degree) \
        if precision_digits is None else int(precision_digits)
    if precision < 16:
        raise ZerosError("precision must be at least 16 digits")

    entries = []
    # roots at the origin are exact
    val = 0
    while p.coeffs[val].is_zero():
        val += 1
    if val:
        entries.append(ZeroEntry(mpc(0), val, mpf(0), mpf(0)))
    work = DensePoly(p.coeffs[val:])

    if work.degree == 0:
        return ZeroSet(tuple(entries), p.degree, precision, True, "", label)

    sf = _is_squarefree(work)
    if sf is True:
        # fast path keeps the integer-scale coefficients (no monic blowup);
        # work then carries its own leading scale
        factors = [(work, 1)]
        scale = GaussRat(1)
    else:
        factors = squarefree_decompose(work)
        scale = work.leading()

    # residuals are certified backward errors: |p(x)| divided by the
    # coefficient norm weighted at the point, sum |p_k| |x|^k.  A sup-norm
    # normalization would diverge for roots far outside the unit disk,
    # where both |p| and the attainable evaluation accuracy grow like
    # |x|^deg.  Three digits of the weight suffice.
    with workdps(40):
        abs_coeffs = [abs(c.to_mpc()) for c in p.coeffs]
        scale_mag = abs(scale.to_mpc())

    def point_norm(ax):
        with workdps(40):
            acc = mpf(0)
            for a in reversed(abs_coeffs):
                acc = acc * ax + a
            return acc
    mpolys = [(fac, mult, _MpPoly(fac.deflate(g) if (g := _stride(fac)) > 1
                                  else fac), _stride(fac))
              for fac, mult in factors if fac.degree >= 1]

    note = ""
    valid = True
    radius_cap = mpf(10) ** (-(precision // 2))
    dps_work = precision + 16
    solved = []
    for fac, mult, mpoly, g in mpolys:
        seeds, ok, seed_dps = _aberth(mpoly, precision)
        lifted = []
        if ok:
            for z0 in seeds:
                zd = _lift_root(mpoly, z0, precision, seed_dps)
                if zd is None:
                    ok = False
                    break
                lifted.append(zd[0])
                # cancellation and conditioning that pushed the lift
                # past the request also set the precision needed for
                # meaningful radii and residuals
                dps_work = max(dps_work, zd[1])
        if not ok:
            valid = False
            note = (f"factor of degree {fac.degree} did not converge; "
                    "set unusable")
            continue
        solved.append((fac, mult, mpoly, g, lifted))

    for fac, mult, mpoly, g, lifted in solved:
        dy = mpoly.degree
        others = [(om_poly, om) for of, om, om_poly, og in mpolys
                  if of is not fac]
        other_strides = [og for of, om, om_poly, og in mpolys if of is not fac]
        with workdps(dps_work):
            for y in lifted:
                v, dv, err = _certified_eval(mpoly, y, dps_work)
                if dv == 0:
                    valid = False
                    note = "vanishing derivative at a refined root"
                    continue
                ry = dy * (abs(v) + err) / abs(dv)
                fval = abs(v) + err
                for k in range(g):
                    x = _to_x(y, g, k)
                    if g == 1:
                        rx = ry
                    else:
                        rx = 2 * ry * abs(x) / (g * abs(y)) \
                            + abs(x) * mpf(10) ** (-dps_work + 4)
                    resid = scale_mag * fval ** mult
                    if val:
                        resid *= abs(x) ** val
                    for (om_poly, om), og in zip(others, other_strides):
                        ov, _dv2, oerr = _certified_eval(
                            om_poly, x ** og if og > 1 else x, dps_work)
                        resid *= (abs(ov) + oerr) ** om
                    entries.append(
                        ZeroEntry(x, mult, rx, resid / point_norm(abs(x))))
                    if rx > radius_cap:
                        valid = False
                        note = "certified radius above the contract bound"

    entries.sort(key=_entry_sort_key)
    return ZeroSet(tuple(entries), p.degree, precision, valid, note, label)


def _stride(fac: DensePoly) -> int:
    g = fac.support_stride()
    return g if g >= 2 else 1


def _to_x(y, g, k):
    if g == 1:
        return y
    return mp.root(y, g, k)


def _entry_sort_key(e):
    z = mpc(e.root)
    return (float(mp.arg(z)) if z != 0 else 0.0, float(abs(z)),
            float(z.real), float(z.imag))


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of the three independent checks on a ZeroSet."""

    count_ok: bool
    separation_ok: bool
    reconstruction_ok: bool
    max_reconstruction_defect: object
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.count_ok and self.separation_ok and self.reconstruction_ok


def certify_zeros(p: DensePoly, zs: ZeroSet) -> CertificationReport:
    """Check count, pairwise separation, and product reconstruction.

    Reconstruction compares the monic product of (x - root)^mult against
    p divided by its leading coefficient, coefficientwise, relative to
    the coefficient sup norm, with tolerance 10^(-precision/4).  Any
    failed check marks the set unusable (ok is False).
    """
    if not isinstance(p, DensePoly):
        p = DensePoly(p)
    if not zs.valid:
        return CertificationReport(False, False, False, mpf("inf"),
                                   "set was flagged invalid by the finder")
    count_ok = zs.count() == p.degree

    # separation: inclusion disks must not overlap
    separation_ok = True
    roots = [mpc(e.root) for e in zs.entries]
    radii = [e.radius for e in zs.entries]
    zf = np.array([complex(z) for z in roots])
    rf = np.array([float(r) for r in radii])
    if np.all(np.isfinite(zf)):
        dist = np.abs(zf[:, None] - zf[None, :])
        lim = rf[:, None] + rf[None, :]
        np.fill_diagonal(dist, np.inf)
        bad = dist <= lim * (1 + 1e-9)
        if bad.any():
            separation_ok = False
    else:
        separation_ok = False

    # reconstruction precision: partial products of the monic factors
    # swell to roughly sum of m_i * log10(1+|z_i|) digits before the final
    # coefficients cancel back down, so the working precision must cover
    # that swell on top of the comparison tolerance
    tol = mpf(10) ** (-(zs.precision // 4))
    with workdps(40):
        lead_mag = abs(p.leading().to_mpc())
        sup_ref = max(abs(c.to_mpc()) for c in p.coeffs) / lead_mag
        swell = sum(e.multiplicity * mp.log10(1 + abs(mpc(e.root)))
                    for e in zs.entries)
        extra = float(swell - mp.log10(sup_ref))
    dps_rec = max(zs.precision // 2 + 24, 64)
    if extra > 0:
        dps_rec = max(dps_rec, int(extra) + zs.precision // 4 + 32)
    with workdps(dps_rec):
        prod = [mpc(1)]
        for e in zs.entries:
            z = mpc(e.root)
            for _ in range(e.multiplicity):
                nxt = [mpc(0)] * (len(prod) + 1)
                for i, c in enumerate(prod):
                    nxt[i + 1] += c
                    nxt[i] -= z * c
                prod = nxt
        lead = p.leading().to_mpc()
        ref = [c.to_mpc() / lead for c in p.coeffs]
        defect = mpf(0)
        if len(prod) != len(ref):
            defect = mpf("inf")
        else:
            norm = max(abs(c) for c in ref)
            for a, b in zip(prod, ref):
                defect = max(defect, abs(a - b) / norm)
    reconstruction_ok = bool(defect < tol) and count_ok
    note = "" if (count_ok and separation_ok and reconstruction_ok) else \
        "certification failed; set unusable for diagnostics"
    return CertificationReport(count_ok, separation_ok, reconstruction_ok,
                               defect, note)
