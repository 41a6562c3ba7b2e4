import time
from fractions import Fraction

from mpmath import mp, mpc, mpf

from brickzeros.amplitude import (build_initial_state, loschmidt_exact,
                                  numerator_for_zeros)
from brickzeros.circuit import CircuitParams
from brickzeros.exactarith import DensePoly, GaussRat
from brickzeros.rootfind import (CertificationReport, ZeroSet, certify_zeros,
                                 find_zeros, read_zeros_csv, write_zeros_csv)


def F(re, im=0):
    return GaussRat(Fraction(re), Fraction(im))


# x^4 - 1
p = DensePoly([F(-1), F(0), F(0), F(0), F(1)])
zs = find_zeros(p, 64)
assert zs.valid and zs.count() == 4
want = sorted((complex(0, -1), complex(1), complex(0, 1), complex(-1)),
              key=lambda z: (0.0 if z == 0 else __import__("cmath").phase(z)))
got = [complex(mpc(e.root)) for e in zs.entries]
for a, b in zip(got, want):
    assert abs(a - b) < 1e-50 or abs(a - b) < 1e-12, (a, b)
rep = certify_zeros(p, zs)
assert rep.ok, rep
print("x^4-1 ok:", [mp.nstr(mpc(e.root), 5) for e in zs.entries],
      "max radius", mp.nstr(zs.max_radius(), 3))

# (x-2)^3 multiple root via exact decomposition
p3 = DensePoly([F(-8), F(12), F(-6), F(1)])
zs3 = find_zeros(p3, 64)
assert zs3.count() == 3 and len(zs3.entries) == 1
assert zs3.entries[0].multiplicity == 3
assert abs(mpc(zs3.entries[0].root) - 2) < mpf("1e-30")
assert certify_zeros(p3, zs3).ok
print("(x-2)^3 ok")

# origin roots: x^3 (x - 1)
p0 = DensePoly([F(0), F(0), F(0), F(-1), F(1)])
zs0 = find_zeros(p0, 64)
assert zs0.count() == 4
mults = {complex(mpc(e.root)).real: e.multiplicity for e in zs0.entries}
assert zs0.entries and certify_zeros(p0, zs0).ok
print("x^3(x-1) ok:", [(mp.nstr(mpc(e.root), 3), e.multiplicity)
                       for e in zs0.entries])

# broken sets are rejected
bad = ZeroSet(zs.entries[:-1], zs.degree, zs.precision)
assert not certify_zeros(p, bad).count_ok
from brickzeros.rootfind import ZeroEntry
pert = list(zs.entries)
e0 = pert[0]
pert[0] = ZeroEntry(mpc(e0.root) + mpf("1e-3"), e0.multiplicity, e0.radius,
                    e0.residual)
rep_bad = certify_zeros(p, ZeroSet(tuple(pert), zs.degree, zs.precision))
assert not rep_bad.reconstruction_ok
print("tamper detection ok")

# ---------------------------------------------------------------------------
# massive benchmark numerator, n=10 (degree 152)
t0 = time.time()
state = build_initial_state("dwsym", 8, 2)
params = CircuitParams(F(2), 8, 2, "exact")
res10 = loschmidt_exact(state, params, 10)
num10 = numerator_for_zeros(res10)
print(f"n=10 amplitude: {time.time() - t0:.2f}s, degree {num10.degree}")
t0 = time.time()
zs10 = find_zeros(num10)
dt_find = time.time() - t0
t0 = time.time()
rep10 = certify_zeros(num10, zs10)
dt_cert = time.time() - t0
print(f"n=10 zeros: find {dt_find:.2f}s certify {dt_cert:.2f}s "
      f"count={zs10.count()} valid={zs10.valid} "
      f"maxrad={mp.nstr(zs10.max_radius(), 3)} "
      f"maxres={mp.nstr(zs10.max_residual(), 3)} "
      f"defect={mp.nstr(rep10.max_reconstruction_defect, 3)}")
assert zs10.count() == 152 and zs10.valid and rep10.ok
assert zs10.max_residual() < mpf("1e-30")

# Z4 closure: multiset invariant under x -> i x
roots = [(mpc(e.root), e.multiplicity) for e in zs10.entries]
for z, m in roots:
    rot = z * mpc(0, 1)
    ok = any(abs(rot - w) < mpf("1e-40") and m == mm for w, mm in roots)
    assert ok, z
# conjugation closure (real q)
for z, m in roots:
    cj = mp.conj(z)
    ok = any(abs(cj - w) < mpf("1e-40") and m == mm for w, mm in roots)
    assert ok, z
print("Z4 + conjugation closure ok")

# csv round trip
write_zeros_csv("/tmp/zeros10.csv", zs10)
rows = read_zeros_csv("/tmp/zeros10.csv")
assert len(rows) == len(zs10.entries)
print("csv ok:", rows[0])

# massless benchmark numerator, n=10
t0 = time.time()
params_ml = CircuitParams(F("3/5", "4/5"), 8, 2, "exact")
res_ml = loschmidt_exact(state, params_ml, 10)
num_ml = numerator_for_zeros(res_ml)
zs_ml = find_zeros(num_ml)
rep_ml = certify_zeros(num_ml, zs_ml)
print(f"massless n=10: {time.time() - t0:.2f}s count={zs_ml.count()} "
      f"valid={zs_ml.valid} ok={rep_ml.ok} "
      f"maxres={mp.nstr(zs_ml.max_residual(), 3)}")
assert zs_ml.count() == num_ml.degree == 152 and rep_ml.ok

# ---------------------------------------------------------------------------
# the big one: n=100, degree 1592
t0 = time.time()
res100 = loschmidt_exact(state, params, 100)
num100 = numerator_for_zeros(res100)
print(f"n=100 amplitude: {time.time() - t0:.1f}s, degree {num100.degree}")
t0 = time.time()
zs100 = find_zeros(num100)
dt_find = time.time() - t0
t0 = time.time()
rep100 = certify_zeros(num100, zs100)
dt_cert = time.time() - t0
print(f"n=100 zeros: find {dt_find:.1f}s certify {dt_cert:.1f}s "
      f"count={zs100.count()} valid={zs100.valid} ok={rep100.ok} "
      f"maxrad={mp.nstr(zs100.max_radius(), 3)} "
      f"maxres={mp.nstr(zs100.max_residual(), 3)} "
      f"defect={mp.nstr(rep100.max_reconstruction_defect, 3)}")
assert zs100.count() == 1592 and zs100.valid and rep100.ok
print("ALL ZEROS CHECKS PASSED")
