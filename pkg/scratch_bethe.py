import time

from mpmath import mp, mpc, mpf

from brickzeros.amplitude import build_initial_state, loschmidt_numeric
from brickzeros.bethe import (BetheRoots, bae_residual, default_m2_seeds,
                              floquet_eigenvalue_bethe, membership_report,
                              sector_spectrum, solve_bae_m1, solve_bae_m2,
                              spectral_decomposition)
from brickzeros.circuit import CircuitParams
from fractions import Fraction

from brickzeros.exactarith import GaussRat


def F(re, im=0):
    return GaussRat(Fraction(re), Fraction(im))


def check_m1(L, q, x, tol="1e-10"):
    params = CircuitParams(q, L, 1, "exact", x)
    notes = []
    sols = solve_bae_m1(params, dps=128, notes=notes)
    spec = sector_spectrum(params, dps=128)
    assert len(spec) == L
    worst = mpf(0)
    for sol in sols:
        assert sol.is_admissible(), sol.to_json()
        tau = floquet_eigenvalue_bethe(sol, dps=128)
        dist = min(abs(tau - lam) for lam in spec)
        worst = max(worst, dist)
    print(f"L={L} q={q} x={x}: {len(sols)} m1 solutions, "
          f"worst spectrum distance {mp.nstr(worst, 4)}, notes={notes}")
    assert worst < mpf(tol), worst
    return sols


t0 = time.time()
s4 = check_m1(4, F(2), F("1/3"))
s6 = check_m1(6, F(2), F("1/3"))
check_m1(4, F("3/5", "4/5"), F("1/3"))
check_m1(6, F("3/5", "4/5"), F("2/5", "1/7"))

# x=1 identity circuit: every tau equals 1
params_id = CircuitParams(F(2), 4, 1, "exact", F(1))
for sol in solve_bae_m1(params_id, dps=128):
    tau = floquet_eigenvalue_bethe(sol, dps=128)
    assert abs(tau - 1) < mpf("1e-100"), tau
print("x=1: all m1 tau = 1 ok")

# non-solution residual is large
bad = BetheRoots(roots=(mpc("0.3", "0.4"),), L=4, q=mpc(2), x=mpc(1) / 3)
r = bae_residual(bad, dps=128)
assert abs(r[0]) > mpf("1e-3"), r
print("random non-solution residual:", mp.nstr(abs(r[0]), 5))

# M=0 vacuous
empty = BetheRoots(roots=(), L=4, q=mpc(2), x=mpc(1) / 3)
assert bae_residual(empty) == []
assert floquet_eigenvalue_bethe(empty) == 1
assert empty.is_admissible()
print("M=0 vacuous ok")

# membership report shape
rep = membership_report(s4, CircuitParams(F(2), 4, 1, "exact", F("1/3")),
                        dps=128)
assert all(row["member"] for row in rep), rep
print("membership report ok:", rep[0])

# ---------------------------------------------------------------------------
# M=2 at L=8, q=2, x=1/3
t1 = time.time()
params8 = CircuitParams(F(2), 8, 2, "exact", F("1/3"))
notes = []
sols2 = solve_bae_m2(params8, dps=128, notes=notes)
print(f"m2: {len(sols2)} converged solutions, {len(notes)} notes "
      f"({time.time() - t1:.1f}s)")
spec2 = sector_spectrum(params8, dps=128)
assert len(spec2) == 28
worst = mpf(0)
for sol in sols2:
    assert sol.is_admissible()
    assert abs(sol.roots[0] - sol.roots[1]) > mpf("1e-8")
    tau = floquet_eigenvalue_bethe(sol, dps=128)
    dist = min(abs(tau - lam) for lam in spec2)
    worst = max(worst, dist)
print("m2 worst spectrum distance:", mp.nstr(worst, 4))
assert worst < mpf("1e-8"), worst

# fixed point: reseeding with an exact solution returns it unchanged
sol0 = sols2[0]
refit = solve_bae_m2(params8, seeds=[sol0.roots], dps=128)
assert len(refit) == 1
assert abs(refit[0].roots[0] - sol0.roots[0]) < mpf("1e-50")
assert abs(refit[0].roots[1] - sol0.roots[1]) < mpf("1e-50")
print("m2 fixed point ok")

# far seed: reported, not returned
notes_far = []
far = solve_bae_m2(params8, seeds=[(mpc(50, "0.3"), mpc(-50, "0.2"))],
                   dps=128, notes=notes_far)
print("far seed ->", far, notes_far)
assert far == [] and notes_far

# ---------------------------------------------------------------------------
# spectral decomposition
t2 = time.time()
state = build_initial_state("dw", 6, 2)
params6 = CircuitParams(F(2), 6, 2, "exact", F("1/3"))
dec = spectral_decomposition(state, params6, dps=128)
print(f"decomposition: {len(dec.entries)} entries "
      f"({time.time() - t2:.1f}s)")
assert dec.completeness_defect() < mpf("1e-10"), dec.completeness_defect()
for n in (1, 5, 25):
    am = dec.amplitude(n)
    ref = loschmidt_numeric(state, params6, n=n, dps=128)
    rel = abs(am - ref) / abs(ref)
    print(f"  n={n}: rel err vs direct evolution {mp.nstr(rel, 4)}")
    assert rel < mpf("1e-10"), rel

# multi-sector state
cross = build_initial_state("crosscap", 6)
params6c = CircuitParams(F(2), 6, 0, "exact", F("1/3"))
dec_c = spectral_decomposition(cross, params6c, dps=128)
assert dec_c.completeness_defect() < mpf("1e-10")
am = dec_c.amplitude(5)
ref = loschmidt_numeric(cross, params6c, n=5, dps=128)
assert abs(am - ref) / abs(ref) < mpf("1e-10")
print("crosscap multi-sector decomposition ok,", len(dec_c.entries),
      "entries, norm2 =", dec_c.norm2)

# unimodularity on |x| = 1 at real q
dec_u = spectral_decomposition(state, params6, x0=mp.expjpi(mpf("0.23")),
                               dps=128)
worst = max(abs(abs(lam) - 1) for lam, _ in dec_u.entries)
print("unimodularity defect on |x|=1:", mp.nstr(worst, 4))
assert worst < mpf("1e-12")

print(f"ALL BETHE CHECKS PASSED ({time.time() - t0:.1f}s total)")
