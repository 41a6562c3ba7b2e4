import sys, time
sys.path.insert(0, 'src')
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf, mpc

from brickzeros.exactarith import GaussRat
from brickzeros.circuit import CircuitParams
from brickzeros.amplitude import build_initial_state, loschmidt_exact, \
    numerator_for_zeros
from brickzeros.rootfind import find_zeros, certify_zeros, ZeroSet, ZeroEntry
from brickzeros.diagnostics import (
    universal_locus, circle_locus, zero_density, fit_density_scaling,
    symmetry_report, ScanGrid, equimodular_scan, massive_q_for_delta,
    massless_q_for_delta, delta_sweep, write_density_csv, read_density_csv,
    DensityReport, DiagnosticsError)


def F(re, im=0):
    return GaussRat(Fraction(re), Fraction(im))


# --- locus regimes
loc = universal_locus(F(2))
assert loc.regime == "massive" and loc.description == "unit_circle"
assert abs(float(loc.distance(mpc("1.05", 0))) - 0.05) < 1e-12
locm = universal_locus(F(Fraction(3, 5), Fraction(4, 5)))
assert locm.regime == "massless"
assert abs(float(locm.distance(mpc("0.03", "2.0"))) - 0.03) < 1e-12
for bad in (F(1), F(-1), F(0)):
    try:
        universal_locus(bad)
        raise AssertionError("degenerate q accepted")
    except DiagnosticsError:
        pass
try:
    universal_locus(F(Fraction(1, 2), Fraction(1, 3)))
    raise AssertionError("generic q accepted")
except DiagnosticsError:
    pass
print("locus ok")

# --- density on synthetic sets
on_circle = ZeroSet(tuple(ZeroEntry(mp.expjpi(mpf(2 * k) / 8), 1,
                                    mpf(0), mpf(0)) for k in range(8)),
                    8, 64)
rep = zero_density(on_circle, loc, mpf("1e-6"))
assert rep.R == 1.0 and rep.total == 8
off = ZeroSet(tuple(ZeroEntry(mpc("1.02", 0) * mp.expjpi(mpf(2 * k) / 8),
                              1, mpf(0), mpf(0)) for k in range(8)), 8, 64)
assert zero_density(off, loc, mpf("0.01")).R == 0.0
assert zero_density(off, loc, mpf("0.03")).R == 1.0
print("density ok")

# --- scaling fit recovery
eps_grid = [0.3, 0.1, 0.03, 0.01, 0.003]
reps = [DensityReport(2.0, e, 100, 1 - 0.5 * e ** 0.2, 100, 0)
        for e in eps_grid]
fit = fit_density_scaling(reps)
assert abs(fit.c - 0.5) < 1e-10 and abs(fit.r - 0.2) < 1e-10, (fit.c, fit.r)
assert fit.residual < 1e-10 and not fit.degenerate
const = [DensityReport(2.0, e, 100, 0.75, 100, 0) for e in eps_grid]
cfit = fit_density_scaling(const)
assert cfit.degenerate and abs(cfit.r) < 1e-9
sat = [DensityReport(2.0, e, 100, 1.0, 100, 100) for e in eps_grid]
try:
    fit_density_scaling(sat)
    raise AssertionError("saturated fit accepted")
except DiagnosticsError:
    pass
print("fit ok")

# --- symmetry on the exact benchmark
params = CircuitParams(F(2), 8, 2)
state = build_initial_state("dwsym", 8, 2)
res = loschmidt_exact(state, params, 10)
zs = find_zeros(numerator_for_zeros(res))
sym = symmetry_report(zs, params=params)
assert sym.rotation_ok and sym.conjugation_checked and sym.conjugation_ok, sym
bad = ZeroSet((ZeroEntry(mpc(1, 0), 1, mpf(0), mpf(0)),
               ZeroEntry(mpc(0, 1), 1, mpf(0), mpf(0)),
               ZeroEntry(mpc(-1, 0), 1, mpf(0), mpf(0)),
               ZeroEntry(mpc("0.01", "-1.0"), 1, mpf(0), mpf(0))), 4, 64)
bsym = symmetry_report(bad, q=F(2))
assert not bsym.rotation_ok and bsym.rotation_defect > 1e-3
print("symmetry ok", sym.rotation_defect, sym.conjugation_defect)

# --- equimodular scan, massive, state-aware
# Expected structure for the dwsym state: visible crossings on |x|=1
# (radial dips, one per non-diagonal ray of the grid) and along the
# diagonals arg x = pi/4 + k pi/2, where a visible conjugate pair
# shares one modulus along the whole ray while the raw leading group
# is symmetry-dark; the exact zero sets hug both loci.
import math as _math


def locus_dist(z):
    z = complex(z)
    return (abs(abs(z) - 1),
            abs(abs(z.real) - abs(z.imag)) / _math.sqrt(2))


dwsym = build_initial_state("dwsym", 8, 2)
t0 = time.time()
grid = ScanGrid.polar(0.8, 1.2, 6, 16)  # radii avoid hitting |x|=1 exactly
scan = equimodular_scan(params, grid, state=dwsym, max_confirm=80)
t1 = time.time()
assert scan.equimodular, "no equimodular points found"
worst = max(min(locus_dist(z)) for z in scan.equimodular)
n_circ = sum(1 for z in scan.equimodular if locus_dist(z)[0] < 1e-6)
n_diag = sum(1 for z in scan.equimodular if locus_dist(z)[1] < 1e-6)
print(f"massive scan (dwsym): {len(scan.equimodular)} crossings "
      f"({n_circ} circle, {n_diag} diagonal), worst locus dist {worst:.3e}, "
      f"{len(scan.weight_zero)} weight zeros, spacing {scan.spacing:.3f}, "
      f"{t1-t0:.1f}s, skipped {len(scan.skipped)}")
assert worst < 1e-6, "crossings should sit on circle or diagonals"
assert n_circ >= 10, "circle radial dips missing"
assert n_diag >= 4, "diagonal ray points missing"
for z in scan.weight_zero:
    c, d = locus_dist(z)
    assert min(c, d) < 1e-5, f"weight zero off both loci: {complex(z)}"
from collections import Counter
reasons = Counter(r for _, r in scan.skipped)
print("  skip reasons:", dict(reasons))

# raw scan keeps the zero-weight branch crossings as well
t0 = time.time()
raw = equimodular_scan(params, ScanGrid.polar(0.8, 1.2, 5, 8))
t1 = time.time()
worst_raw = max(abs(abs(complex(z)) - 1) for z in raw.equimodular)
print(f"massive scan (raw): {len(raw.equimodular)} pts, worst "
      f"{worst_raw:.3e}, {t1-t0:.1f}s")
assert worst_raw > 1e-3, "raw scan should also see symmetry-dark branches"

# --- equimodular scan, massless
params_ml = CircuitParams(F(Fraction(3, 5), Fraction(4, 5)), 8, 2)
t0 = time.time()
scan_ml = equimodular_scan(params_ml, ScanGrid.polar(0.8, 1.2, 5, 8))
t1 = time.time()
assert scan_ml.equimodular, "no massless equimodular points"
worst_ml = max(min(abs(complex(z).real), abs(complex(z).imag))
               for z in scan_ml.equimodular)
print(f"massless scan: {len(scan_ml.equimodular)} pts, worst axis dist "
      f"{worst_ml:.3e}, {t1-t0:.1f}s")
assert worst_ml < scan_ml.spacing

# --- mechanism-1 plumbing: orthogonal state errors out
dw1 = build_initial_state("dw", 8, 1)
try:
    equimodular_scan(params, grid, state=dw1)
    raise AssertionError("orthogonal state accepted")
except Exception as exc:
    print("orthogonal state ->", type(exc).__name__)

# small grid crossing a diagonal still reports the weight zero
scan_w = equimodular_scan(params, ScanGrid.polar(0.9, 1.1, 3, 6),
                          state=build_initial_state("dwsym", 8, 2))
print("weight scan ok:", len(scan_w.weight_zero), "mechanism-1 points")

# --- sweep parametrization
q, deff = massive_q_for_delta(1.25)
assert q == F(2) and abs(deff - 1.25) < 1e-12
qf, _ = massive_q_for_delta(1.25, exact=False)
assert abs(float(qf) - 2.0) < 1e-12
qml, dml = massless_q_for_delta(0.6)
assert qml.norm2() == 1 and abs(dml - 0.6) < 0.1
print("sweep params ok", qml, dml)

# --- tiny sweep end to end (small n to keep it fast)
t0 = time.time()
reports = delta_sweep([0.6, 1.25], L=8, M=2, n=20, eps=1e-2)
t1 = time.time()
for r in reports:
    print(f"  delta={r.delta:.4f} locus={r.locus} R={r.R:.4f} "
          f"({r.within}/{r.total})")
print(f"sweep ok in {t1-t0:.1f}s")
write_density_csv('/tmp/dens.csv', reports)
back = read_density_csv('/tmp/dens.csv')
assert len(back) == 2 and abs(back[0].R - reports[0].R) < 1e-15
print("density csv ok")

print("ALL DIAGNOSTICS CHECKS PASSED")
