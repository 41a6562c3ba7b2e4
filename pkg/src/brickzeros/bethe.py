"""Magnon-sector eigenvalue structure of the brickwork Floquet operator.

With q = e^eta and x = e^(xi/2), a sector-M eigenstate is labeled by
rapidities u_1..u_M solving

    [ sinh(u_j - xi/2 + eta) sinh(u_j + xi/2 + eta)
      / ( sinh(u_j - xi/2)   sinh(u_j + xi/2)     ) ]^(L/2)
        = prod_{k != j} sinh(u_j - u_k + eta) / sinh(u_j - u_k - eta),

and the one-step eigenvalue attached to a root set is the product in
floquet_eigenvalue_bethe.  Everything here is numeric multiprecision:
closed-form one-magnon roots, Newton-refined two-magnon roots, and the
left/right eigendecomposition that expresses a state's return amplitude
as sum_j w_j lambda_j^n.  Solver output is only ever checked for
membership in the dense sector spectrum; completeness of a root
catalogue is never assumed.

All ratios entering the equations depend on u only through z = e^(2u),
and on branch choices of eta, xi only through q^2, x^2, so roots are
canonicalized to the strip Im u in (-pi/2, pi/2].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from mpmath import mp, mpc, mpf, workdps

from .circuit import CircuitParams, PoleError, _as_mpc, floquet_matrix_numeric
from .config import default_solver_dps


class BetheError(ValueError):
    """Invalid input to the Bethe layer, or a degenerate parameter point."""


class DefectiveMatrixError(BetheError):
    """Left/right eigenvector pairing broke down (matrix nearly defective)."""


RESIDUAL_TOL = mpf("1e-20")
DISTINCT_TOL = mpf("1e-8")


# ---------------------------------------------------------------------------
# root containers


@dataclass(frozen=True)
class BetheRoots:
    """A candidate root set: rapidities plus recorded equation residuals."""

    roots: tuple
    L: int
    q: object
    x: object
    residuals: tuple = ()
    notes: tuple = ()

    @property
    def M(self) -> int:
        return len(self.roots)

    def max_residual(self):
        vals = [abs(r) for r in self.residuals]
        return max(vals) if vals else mpf(0)

    def is_admissible(self) -> bool:
        if not self.roots:
            return True
        if any(r == mp.inf or abs(r) == mp.inf for r in self.residuals):
            return False
        return self.max_residual() < RESIDUAL_TOL

    def to_json(self):
        return {
            "M": self.M,
            "L": self.L,
            "roots": [[mp.nstr(u.real, 30), mp.nstr(u.imag, 30)]
                      for u in (mpc(r) for r in self.roots)],
            "residuals": [mp.nstr(abs(r), 8) for r in self.residuals],
            "notes": list(self.notes),
        }


def _eta_xi(q, x):
    q = _as_mpc(q)
    x = _as_mpc(x)
    if abs(q) < mpf("1e-60") or abs(x) < mpf("1e-60"):
        raise BetheError("rapidity parametrization needs q != 0 and x != 0")
    return mp.log(q), 2 * mp.log(x)


def _canonical_u(u):
    # strip representative: Im u in (-pi/2, pi/2]; shifts by i pi are gauge
    k = mp.floor((u.imag + mp.pi / 2) / mp.pi)
    return u - mpc(0, 1) * mp.pi * k


# ---------------------------------------------------------------------------
# equations and eigenvalue


def bae_residual(roots: BetheRoots, dps: int = None):
    """Left minus right side of each magnon equation; inf marks a pole hit."""
    dps = default_solver_dps() if dps is None else dps
    with workdps(dps):
        eta, xi = _eta_xi(roots.q, roots.x)
        us = [_as_mpc(u) for u in roots.roots]
        half = roots.L // 2
        tiny = mpf(10) ** (-(dps // 2))
        out = []
        for j, u in enumerate(us):
            d1 = mp.sinh(u - xi / 2)
            d2 = mp.sinh(u + xi / 2)
            if abs(d1) < tiny or abs(d2) < tiny:
                out.append(mp.inf)
                continue
            lhs = (mp.sinh(u - xi / 2 + eta) * mp.sinh(u + xi / 2 + eta)
                   / (d1 * d2)) ** half
            rhs = mpc(1)
            hit_pole = False
            for k, v in enumerate(us):
                if k == j:
                    continue
                den = mp.sinh(u - v - eta)
                if abs(den) < tiny:
                    hit_pole = True
                    break
                rhs *= mp.sinh(u - v + eta) / den
            out.append(mp.inf if hit_pole else lhs - rhs)
        return out


def floquet_eigenvalue_bethe(roots: BetheRoots, dps: int = None):
    """Eigenvalue of the one-step operator attached to a root set.

    tau = prod_k sinh(u_k - xi/2 + eta) sinh(u_k + xi/2)
                / ( sinh(u_k + xi/2 + eta) sinh(u_k - xi/2) ).
    Empty root set gives 1.
    """
    dps = default_solver_dps() if dps is None else dps
    with workdps(dps):
        if not roots.roots:
            return mpc(1)
        eta, xi = _eta_xi(roots.q, roots.x)
        tiny = mpf(10) ** (-(dps // 2))
        tau = mpc(1)
        for u in roots.roots:
            u = _as_mpc(u)
            den = mp.sinh(u + xi / 2 + eta) * mp.sinh(u - xi / 2)
            if abs(den) < tiny:
                raise PoleError(
                    "eigenvalue pole at root u = " + mp.nstr(u, 10))
            tau *= mp.sinh(u - xi / 2 + eta) * mp.sinh(u + xi / 2) / den
        return tau


# ---------------------------------------------------------------------------
# one magnon: closed form


def _note(notes, line):
    if notes is not None:
        notes.append(line)


def _solve_quadratic(A, B, C, rel_tiny, notes, branch):
    scale = max(abs(A), abs(B), abs(C))
    if scale == 0:
        _note(notes, f"branch {branch}: equation vanishes identically")
        return []
    if abs(A) < rel_tiny * scale:
        if abs(B) < rel_tiny * scale:
            _note(notes, f"branch {branch}: degenerate (A = B = 0)")
            return []
        return [-C / B]
    disc = B * B - 4 * A * C
    sq = mp.sqrt(disc)
    return [(-B + sq) / (2 * A), (-B - sq) / (2 * A)]


def solve_bae_m1(params: CircuitParams, x0=None, dps: int = None,
                 notes: list = None):
    """All one-magnon root candidates from the closed-form quadratic.

    The single equation reads [f(u)]^(L/2) = 1; for each (L/2)-th root of
    unity w, f(u) = w becomes A z^2 + B z + C = 0 in z = e^(2u) with

        A = q^2 x^2 (q^2 - w),
        B = -q^2 (1 + x^4)(1 - w),
        C = x^2 (1 - w q^2).

    Candidates at z = 0 or at the equation's own poles z = x^(+-2) are
    spurious and filtered; duplicates are filtered.  When `notes` is a
    list, one line per filtered candidate is appended.  Output is sorted
    by (|tau|, arg tau, roots).
    """
    dps = default_solver_dps() if dps is None else dps
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise BetheError("solve_bae_m1 needs an evaluation point x")
    with workdps(dps + 20):
        q = params.q_mpc()
        x = _as_mpc(x0)
        if abs(x) < mpf("1e-60"):
            raise BetheError("x = 0 admits no rapidity parametrization")
        q2 = q * q
        x2 = x * x
        x4 = x2 * x2
        half = params.L // 2
        tiny = mpf(10) ** (-(dps // 2))
        rel_tiny = mpf(10) ** (-(3 * dps) // 4)
        cands = []
        for m in range(half):
            w = mp.expjpi(mpf(2 * m) / half)
            A = q2 * x2 * (q2 - w)
            B = -q2 * (1 + x4) * (1 - w)
            C = x2 * (1 - w * q2)
            for z in _solve_quadratic(A, B, C, rel_tiny, notes, m):
                if abs(z) < tiny:
                    _note(notes, f"branch {m}: z = 0 candidate filtered")
                    continue
                if abs(z - x2) < tiny * max(mpf(1), abs(x2)) \
                        or abs(z * x2 - 1) < tiny:
                    _note(notes, f"branch {m}: candidate at equation pole "
                                 "filtered")
                    continue
                cands.append((mp.log(z) / 2, m))
        if not cands:
            raise BetheError(
                "wholly degenerate parameter point: no one-magnon candidates")
        out = []
        seen = []
        for u, m in cands:
            if any(abs(u - v) < DISTINCT_TOL for v in seen):
                _note(notes, f"branch {m}: duplicate root filtered")
                continue
            seen.append(u)
            sol = BetheRoots(roots=(u,), L=params.L, q=q, x=x)
            res = bae_residual(sol, dps=dps)
            out.append(BetheRoots(roots=(u,), L=params.L, q=q, x=x,
                                  residuals=tuple(res)))
        return _sort_solutions(out, dps)


def _sort_solutions(sols, dps):
    def key(sol):
        tau = floquet_eigenvalue_bethe(sol, dps=dps)
        return (float(abs(tau)), float(mp.arg(tau)),
                tuple((float(u.real), float(u.imag))
                      for u in (mpc(r) for r in sol.roots)))
    return sorted(sols, key=key)


# ---------------------------------------------------------------------------
# two magnons: damped Newton on the logarithmic equations


def _log_f(u, eta, xi, half, tiny):
    d1 = mp.sinh(u - xi / 2)
    d2 = mp.sinh(u + xi / 2)
    if abs(d1) < tiny or abs(d2) < tiny:
        return None
    val = mp.sinh(u - xi / 2 + eta) * mp.sinh(u + xi / 2 + eta) / (d1 * d2)
    if abs(val) < tiny:
        return None
    return mp.log(val)


def _m2_raw(u1, u2, eta, xi, half, tiny):
    """(F1, F2) before branch fixing, or None at a pole of either equation.

    F_j = (L/2) log f(u_j) - log S_j with the scattering factor
    S_j = sinh(u_j - u_k + eta) / sinh(u_j - u_k - eta).
    """
    lf1 = _log_f(u1, eta, xi, half, tiny)
    lf2 = _log_f(u2, eta, xi, half, tiny)
    if lf1 is None or lf2 is None:
        return None
    d = u2 - u1
    sp = mp.sinh(d + eta)
    sm = mp.sinh(d - eta)
    if abs(sp) < tiny or abs(sm) < tiny:
        return None
    return (half * lf1 - mp.log(sm / sp),
            half * lf2 - mp.log(sp / sm))


def _m2_jacobian(u1, u2, eta, xi, half):
    def g(u):
        return (mp.coth(u - xi / 2 + eta) + mp.coth(u + xi / 2 + eta)
                - mp.coth(u - xi / 2) - mp.coth(u + xi / 2))
    d = u2 - u1
    h = mp.coth(d + eta) - mp.coth(d - eta)
    return (half * g(u1) - h, h,
            h, half * g(u2) - h)


def default_m2_seeds(params: CircuitParams, x0=None, dps: int = None):
    """Perturbed pairs of one-magnon roots, plus symmetric two-string seeds."""
    dps = default_solver_dps() if dps is None else dps
    with workdps(dps + 20):
        ones = solve_bae_m1(params, x0=x0, dps=dps)
        us = [sol.roots[0] for sol in ones]
        eta, _ = _eta_xi(params.q_mpc(),
                         params.x0 if x0 is None else _as_mpc(x0))
        d = mpc("0.037", "0.023")
        seeds = [(a + d, b - d) for a, b in itertools.combinations(us, 2)]
        seeds.extend((a + eta / 2 + d, a - eta / 2 - d) for a in us)
        return seeds


def solve_bae_m2(params: CircuitParams, seeds=None, x0=None, dps: int = None,
                 max_iter: int = 50, notes: list = None):
    """Two-magnon roots by damped Newton on the logarithmic equations.

    Seeds are (u1, u2) pairs; by default, perturbed pairs of one-magnon
    roots.  Branch integers of the logarithms are frozen at each seed.
    Converged pairs are kept only if their equation residual is below
    1e-20 and they sit away from coincidence and scattering poles;
    everything else is reported through `notes`, never returned.
    Output is deduplicated under permutation and sorted by
    (|tau|, arg tau, roots).
    """
    dps = default_solver_dps() if dps is None else dps
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise BetheError("solve_bae_m2 needs an evaluation point x")
    if seeds is None:
        seeds = default_m2_seeds(params, x0=x0, dps=dps)
    with workdps(dps + 20):
        q = params.q_mpc()
        x = _as_mpc(x0)
        eta, xi = _eta_xi(q, x)
        half = params.L // 2
        tiny = mpf(10) ** (-(dps // 2))
        tol = mpf(10) ** (-(dps // 2))
        accepted = []
        for i, (s1, s2) in enumerate(seeds):
            u1, u2 = _as_mpc(s1), _as_mpc(s2)
            raw = _m2_raw(u1, u2, eta, xi, half, tiny)
            if raw is None:
                _note(notes, f"seed {i}: starts on an equation pole, skipped")
                continue
            two_pi = 2 * mp.pi
            m1 = mp.nint(raw[0].imag / two_pi)
            m2 = mp.nint(raw[1].imag / two_pi)
            shift = mpc(0, 1) * two_pi

            def fvec(a, b):
                r = _m2_raw(a, b, eta, xi, half, tiny)
                if r is None:
                    return None
                return (r[0] - shift * m1, r[1] - shift * m2)

            F = fvec(u1, u2)
            ok = False
            for _ in range(max_iter):
                fn = max(abs(F[0]), abs(F[1]))
                if fn < tol:
                    ok = True
                    break
                a11, a12, a21, a22 = _m2_jacobian(u1, u2, eta, xi, half)
                det = a11 * a22 - a12 * a21
                scale = max(abs(a11) * abs(a22), abs(a12) * abs(a21), mpf(1))
                if abs(det) < mpf(10) ** (-dps) * scale:
                    _note(notes, f"seed {i}: singular Jacobian, skipped")
                    break
                s1n = (a22 * F[0] - a12 * F[1]) / det
                s2n = (a11 * F[1] - a21 * F[0]) / det
                lam = mpf(1)
                moved = False
                while lam > mpf(2) ** -40:
                    c1, c2 = u1 - lam * s1n, u2 - lam * s2n
                    Fn = fvec(c1, c2)
                    if Fn is not None \
                            and max(abs(Fn[0]), abs(Fn[1])) < (1 - lam / 4) * fn:
                        u1, u2, F = c1, c2, Fn
                        moved = True
                        break
                    lam /= 2
                if not moved:
                    _note(notes, f"seed {i}: stalled (no descent step)")
                    break
            else:
                _note(notes, f"seed {i}: not converged in {max_iter} "
                             "iterations")
            if not ok:
                continue
            u1c, u2c = _canonical_u(u1), _canonical_u(u2)
            if abs(u1c - u2c) < DISTINCT_TOL:
                _note(notes, f"seed {i}: coincident pair filtered")
                continue
            d = u2c - u1c
            if abs(mp.sinh(d - eta)) < tiny or abs(mp.sinh(d + eta)) < tiny:
                _note(notes, f"seed {i}: scattering pole filtered")
                continue
            bad = False
            for u in (u1c, u2c):
                if abs(mp.sinh(u - xi / 2)) < tiny \
                        or abs(mp.sinh(u + xi / 2)) < tiny:
                    bad = True
            if bad:
                _note(notes, f"seed {i}: equation pole filtered")
                continue
            pair = sorted((u1c, u2c),
                          key=lambda u: (float(u.real), float(u.imag)))
            if any(abs(pair[0] - p[0]) < DISTINCT_TOL
                   and abs(pair[1] - p[1]) < DISTINCT_TOL
                   for p in accepted):
                _note(notes, f"seed {i}: duplicate solution filtered")
                continue
            sol = BetheRoots(roots=tuple(pair), L=params.L, q=q, x=x)
            res = bae_residual(sol, dps=dps)
            sol = BetheRoots(roots=tuple(pair), L=params.L, q=q, x=x,
                             residuals=tuple(res))
            if not sol.is_admissible():
                _note(notes, f"seed {i}: residual above 1e-20, rejected")
                continue
            accepted.append(tuple(pair))
        out = [BetheRoots(roots=p, L=params.L, q=q, x=x,
                          residuals=tuple(bae_residual(
                              BetheRoots(roots=p, L=params.L, q=q, x=x),
                              dps=dps)))
               for p in accepted]
        return _sort_solutions(out, dps)


# ---------------------------------------------------------------------------
# numeric spectral form


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalue/weight pairs expressing <Psi|U^n|Psi> = sum_j w_j lam_j^n."""

    entries: tuple
    state_label: str
    L: int
    q: object
    x: object
    norm2: object

    def total_weight(self):
        acc = mpc(0)
        for _, w in self.entries:
            acc += w
        return acc

    def amplitude(self, n: int):
        acc = mpc(0)
        for lam, w in self.entries:
            acc += w * lam ** n
        return acc

    def completeness_defect(self):
        return abs(self.total_weight() - self.norm2)

    def to_json(self):
        return {
            "state": self.state_label,
            "L": self.L,
            "entries": [[mp.nstr(lam, 30), mp.nstr(w, 30)]
                        for lam, w in self.entries],
            "completeness_defect": mp.nstr(self.completeness_defect(), 8),
        }


def spectral_decomposition(state, params: CircuitParams, x0=None,
                           dps: int = None) -> SpectralDecomposition:
    """Left/right eigendecomposition weights of a state, all sectors.

    The one-step operator is non-normal at generic complex x, so left and
    right eigenvectors are paired by index (l_j A = lam_j l_j, no
    conjugation) and w_j = <Psi|r_j> (l_j . Psi) / (l_j . r_j).
    Multi-sector states concatenate per-sector decompositions.
    """
    dps = default_solver_dps() if dps is None else dps
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise BetheError("spectral_decomposition needs an evaluation point x")
    if state.L != params.L:
        raise BetheError(
            f"state has L = {state.L}, parameters have L = {params.L}")
    with workdps(dps):
        q = params.q_mpc()
        x = _as_mpc(x0)
        entries = []
        for M, coeffs in state.sectors:
            psi = [mpc(c) for c in coeffs]
            A = floquet_matrix_numeric(params.with_sector(M), x0=x, dps=dps)
            E, EL, ER = mp.eig(A, left=True, right=True)
            dim = A.rows
            for j in range(dim):
                r = [ER[i, j] for i in range(dim)]
                l = [EL[j, i] for i in range(dim)]
                pair = mp.fsum(l[i] * r[i] for i in range(dim))
                scale = mp.sqrt(mp.fsum(abs(v) ** 2 for v in r)) \
                    * mp.sqrt(mp.fsum(abs(v) ** 2 for v in l))
                if abs(pair) < mpf(10) ** (-(dps // 3)) * scale:
                    raise DefectiveMatrixError(
                        f"sector M={M} nearly defective at x0: "
                        f"|<l|r>| / (|l| |r|) = "
                        + mp.nstr(abs(pair) / scale, 5))
                bra_r = mp.fsum(mp.conj(psi[i]) * r[i] for i in range(dim))
                l_ket = mp.fsum(l[i] * psi[i] for i in range(dim))
                entries.append((E[j], bra_r * l_ket / pair))
        entries.sort(key=lambda ew: (-float(abs(ew[0])),
                                     float(mp.arg(ew[0])),
                                     -float(abs(ew[1]))))
        return SpectralDecomposition(
            entries=tuple(entries), state_label=state.label(), L=state.L,
            q=q, x=x, norm2=mpf(state.norm2))


def sector_spectrum(params: CircuitParams, x0=None, dps: int = None):
    """Eigenvalues of the one-step sector matrix, sorted by (-|lam|, arg)."""
    dps = default_solver_dps() if dps is None else dps
    x0 = params.x0 if x0 is None else x0
    if x0 is None:
        raise BetheError("sector_spectrum needs an evaluation point x")
    with workdps(dps):
        A = floquet_matrix_numeric(params, x0=x0, dps=dps)
        E = mp.eig(A, left=False, right=False)
        return sorted(E, key=lambda lam: (-float(abs(lam)),
                                          float(mp.arg(lam))))


def membership_report(solutions, params: CircuitParams, x0=None,
                      dps: int = None, tol=None):
    """Distance of each solved eigenvalue to the dense sector spectrum.

    Returns one dict per solution with the eigenvalue, its nearest
    spectrum point distance, and a membership flag.  Solutions must all
    share the same magnon number.
    """
    dps = default_solver_dps() if dps is None else dps
    tol = mpf("1e-8") if tol is None else mpf(tol)
    if not solutions:
        return []
    Ms = {sol.M for sol in solutions}
    if len(Ms) != 1:
        raise BetheError("membership_report needs a single-sector batch")
    spec = sector_spectrum(params.with_sector(Ms.pop()), x0=x0, dps=dps)
    report = []
    with workdps(dps):
        for sol in solutions:
            tau = floquet_eigenvalue_bethe(sol, dps=dps)
            dist = min(abs(tau - lam) for lam in spec)
            report.append({
                "roots": [mp.nstr(mpc(u), 20) for u in sol.roots],
                "tau": mp.nstr(tau, 20),
                "max_residual": mp.nstr(sol.max_residual(), 6),
                "distance_to_spectrum": mp.nstr(dist, 6),
                "member": bool(dist < tol),
            })
    return report
