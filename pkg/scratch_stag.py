import sys, cmath, math
sys.path.insert(0, 'src')
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf, mpc, workdps

from brickzeros.exactarith import GaussRat
from brickzeros.circuit import CircuitParams, floquet_matrix_numeric, \
    gate_values_numeric, sector_basis
from brickzeros.bethe import solve_bae_m1, floquet_eigenvalue_bethe
from brickzeros.staggered import (
    StaggeredError, StaggeredParams, staggered_gate, transfer_matrix,
    staggered_floquet, staggered_eigenvalue, unitarity_defects,
    staggered_unitarity_locus, brickwork_slice)


def F(re, im=0):
    return GaussRat(Fraction(re), Fraction(im))


# --- gate: trivial, high-precision oracle, brickwork slice
g0 = staggered_gate(0.0, 0.7)
assert np.allclose(g0, np.eye(4), atol=1e-15)
with workdps(50):
    bb = mp.sinh(mpf("0.7")) / mp.sinh(mpf("1.0"))
    cc = mp.sinh(mpf("0.3")) / mp.sinh(mpf("1.0"))
g = staggered_gate(0.3, 0.7)
assert abs(g[1, 1] - complex(bb)) < 1e-15 and abs(g[1, 2] - complex(cc)) < 1e-15
x = 0.83 * cmath.exp(0.4j)
q = 2.0
bv, cv = (complex(v) for v in gate_values_numeric(mpc(q), mpc(x)))
gs = staggered_gate(2 * cmath.log(x), cmath.log(q))
assert abs(gs[1, 1] - bv) < 1e-13 and abs(gs[1, 2] - cv) < 1e-13, \
    (gs[1, 1], bv, gs[1, 2], cv)
try:
    staggered_gate(-0.7, 0.7)
    raise AssertionError("gate pole accepted")
except StaggeredError:
    pass
print("gate ok")

# --- theta1 = theta2: identity Floquet
for ctor in (StaggeredParams.alternating, StaggeredParams.blocked):
    p = ctor(0.25 + 0.1j, 0.25 + 0.1j, 0.7, 4)
    U = staggered_floquet(p, 2)
    assert np.allclose(U, np.eye(U.shape[0]), atol=1e-10), ctor
print("identity ok")

# --- brickwork reduction: spectrum matches the main-text operator
def main_spectrum(qv, xv, L, M):
    A = floquet_matrix_numeric(CircuitParams(qv, L, M, mode="float"),
                               x0=mpc(xv), dps=64)
    Af = np.array([[complex(A[i, j]) for j in range(A.cols)]
                   for i in range(A.rows)])
    return np.sort_complex(np.linalg.eigvals(Af))

for qv, xv, L, M, tag in [
        (F(2), 0.83 * cmath.exp(0.4j), 4, 2, "massive L=4"),
        (F(2), 0.83 * cmath.exp(0.4j), 8, 2, "massive L=8"),
        (F(Fraction(3, 5), Fraction(4, 5)), 0.9 * cmath.exp(1.1j), 4, 2,
         "massless L=4")]:
    for arr in ("alternating", "blocked"):
        sp = brickwork_slice(complex(qv.to_mpc()), xv, L, arr)
        lam_s = np.sort_complex(np.linalg.eigvals(staggered_floquet(sp, M)))
        lam_m = main_spectrum(qv, xv, L, M)
        d = np.abs(lam_s - lam_m).max()
        print(f"  reduction {tag} {arr}: max spectral diff {d:.3e}")
        assert d < 1e-10, (tag, arr, d)
print("reduction ok")

# --- arrangement invariance of spectra, difference of DW overlaps
t1, t2, eta = 0.2 - 0.1j, 0.5 + 0.3j, 0.7
pa = StaggeredParams.alternating(t1, t2, eta, 4)
pb = StaggeredParams.blocked(t1, t2, eta, 4)
Ua = staggered_floquet(pa, 2)
Ub = staggered_floquet(pb, 2)
la = np.sort_complex(np.linalg.eigvals(Ua))
lb = np.sort_complex(np.linalg.eigvals(Ub))
assert np.abs(la - lb).max() < 1e-10
basis = sector_basis(4, 2)
idw = basis.index_of(0b1100)
overlaps_a = [np.linalg.matrix_power(Ua, n)[idw, idw] for n in (1, 2, 3)]
overlaps_b = [np.linalg.matrix_power(Ub, n)[idw, idw] for n in (1, 2, 3)]
diff = max(abs(u - v) for u, v in zip(overlaps_a, overlaps_b))
print(f"arrangements: spectra {np.abs(la-lb).max():.2e}, overlap diff {diff:.3e}")
assert diff > 1e-6, "arrangements should give different DW amplitudes"

# --- eigenvalue formula: empty set, slice against the exact tau
assert staggered_eigenvalue((), 0.1, 0.2, 0.7) == 1
for qv, xv in [(F(2), mpc("0.9", "0.2")),
               (F(Fraction(3, 5), Fraction(4, 5)), mpc("0.4", "0.7"))]:
    params = CircuitParams(qv, 8, 1, mode="float")
    sols = solve_bae_m1(params, x0=xv)
    theta = complex(mp.log(xv))
    eta_v = complex(mp.log(qv.to_mpc()))
    worst = 0.0
    for roots in sols:
        tau = complex(floquet_eigenvalue_bethe(roots))
        lam = staggered_eigenvalue(roots, -theta, theta, eta_v)
        worst = max(worst, abs(lam - tau) / abs(tau))
    print(f"  slice eigenvalue vs tau: {worst:.3e} over {len(sols)} roots")
    assert worst < 1e-12

# --- M=1 membership for a genuinely staggered point
t1, t2, eta = 0.15 - 0.2j, 0.45 + 0.1j, 0.65
L = 6
p = StaggeredParams.alternating(t1, t2, eta, L)
U = staggered_floquet(p, 1)
spec = np.linalg.eigvals(U)
# magnon-1 quantization: [sinh(u-t1+eta) sinh(u-t2+eta)]
#                      = zeta [sinh(u-t1) sinh(u-t2)], zeta^{L/2} = 1
found = []
for m in range(L // 2):
    zeta = cmath.exp(2j * math.pi * m / (L // 2))
    al = cmath.exp(2 * eta) - zeta
    ga = (cmath.exp(-2 * eta) - zeta) * cmath.exp(2 * (t1 + t2))
    be = (zeta - 1) * (cmath.exp(t1 - t2) + cmath.exp(t2 - t1)) \
        * cmath.exp(t1 + t2)
    disc = cmath.sqrt(be * be - 4 * al * ga)
    for sgn in (1, -1):
        w = (-be + sgn * disc) / (2 * al)
        if w == 0:
            continue
        u = cmath.log(w) / 2
        lam = staggered_eigenvalue([u], t1, t2, eta)
        found.append(min(abs(lam - s) / abs(s) for s in spec))
print(f"  M=1 membership: {len(found)} roots, worst {max(found):.3e}")
assert len(found) == L and max(found) < 1e-8

# --- unitarity loci
loc = staggered_unitarity_locus(2.0, 1.0)
assert loc.regime == "massive" and loc.shape == "circle"
worst = max(max(loc.defects(a)) for a in loc.sample(25))
print(f"  massive locus: worst defect {worst:.3e}")
assert worst < 1e-12
# a on the circle |a|=|b| for complex b
samples = [abs(1 + 1j) * cmath.exp(1j * t) for t in np.linspace(0, 6.2, 17)]
worst_b = max(max(unitarity_defects(a, 1 + 1j, 2.0)) for a in samples)
assert worst_b < 1e-12, worst_b
try:
    unitarity_defects(2.0, 1.0, 2.0)   # q*b/a = 1: the gate itself blows up
    raise AssertionError("gate pole accepted")
except StaggeredError:
    pass
d1, d2 = unitarity_defects(2.0, 1.0, 3.0)
assert max(d1, d2) > 1e-3, "off-locus point passed"
locm = staggered_unitarity_locus(cmath.exp(1j * math.pi / 5), 1 + 1j)
assert locm.regime == "massless" and locm.shape == "line"
assert max(locm.defects(0.7 * (1 + 1j))) < 1e-12
assert not locm.check(1j * (1 + 1j))
wl = max(max(locm.defects(a)) for a in locm.sample(21))
print(f"  massless locus: worst defect {wl:.3e}")
assert wl < 1e-12
for bad in (1.0, -1.0, 1j, -1j, cmath.exp(0.25j * math.pi) * 0 + 1j):
    try:
        staggered_unitarity_locus(bad, 1.0)
        raise AssertionError(f"special point {bad} accepted")
    except StaggeredError:
        pass
print("loci ok")

# --- unimodular spectrum on the locus
for qv, av, bv, tag in [
        (2.0, cmath.exp(0.8j), 1.0, "massive"),
        (cmath.exp(1j * math.pi / 5), 0.6, 1.0, "massless")]:
    p = StaggeredParams.alternating(cmath.log(av), cmath.log(bv),
                                    cmath.log(qv), 4)
    lam = np.linalg.eigvals(staggered_floquet(p, 2))
    dev = np.abs(np.abs(lam) - 1).max()
    print(f"  unimodularity {tag}: {dev:.3e}")
    assert dev < 1e-10

print("ALL STAGGERED CHECKS PASSED")
