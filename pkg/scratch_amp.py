import time
from fractions import Fraction

from mpmath import mp

from brickzeros.exactarith import GaussRat, DensePoly
from brickzeros.circuit import CircuitParams
from brickzeros.amplitude import (
    build_initial_state, loschmidt_exact, loschmidt_point_exact,
    loschmidt_numeric, numerator_for_zeros,
)

# ---- cross-oracle consistency on small sizes
for L in (4, 6):
    for kind, M in (("dw", 1), ("dw", 2), ("dwsym", 2), ("neel", None),
                    ("dimer", None), ("crosscap", None)):
        st = build_initial_state(kind, L, M)
        m0 = st.sector_numbers[0] if len(st.sector_numbers) == 1 else L // 2
        for qs in ("2", "3/5+4/5i"):
            q = GaussRat.parse(qs)
            params = CircuitParams(q=q, L=L, M=m0 if len(st.sector_numbers) == 1 else 0, mode="exact")
            if len(st.sector_numbers) > 1:
                params = CircuitParams(q=q, L=L, M=st.sector_numbers[0], mode="exact")
            res = loschmidt_exact(st, params, 3)
            for xs in ("1/3", "2/5+1/7i"):
                x0 = GaussRat.parse(xs)
                a = res.evaluate(x0)
                b = loschmidt_point_exact(st, params, x0, 3)
                assert a == b, (L, kind, qs, xs, a.as_str_pair(), b.as_str_pair())
                mp.dps = 60
                c = loschmidt_numeric(st, params, x0, 3, dps=60)
                err = abs(a.to_mpc() - c)
                assert err < mp.mpf(10) ** -40, (L, kind, qs, xs, err)
            # identity at x = 1: amplitude equals the squared norm
            one = res.evaluate(GaussRat(1))
            assert one == GaussRat(st.norm2), (L, kind, qs, one.as_str_pair(), st.norm2)
print("cross-oracle + x=1 OK")

# ---- massive benchmark: symmetrized DW(2), L=8, q=2, n=10
q = GaussRat(2)
params = CircuitParams(q=q, L=8, M=2, mode="exact")
st = build_initial_state("dwsym", 8, 2)
t0 = time.time()
res = loschmidt_exact(st, params, 10)
t1 = time.time()
print(f"n=10 massive: {t1-t0:.2f}s  K={res.ledger_k}  deg={res.numerator_degree}")
assert res.ledger_k == 38
assert res.numerator_degree == 152
assert res.x4_support
assert len(res.den_factors) == 1
fac, e = res.den_factors[0]
assert e == 38
assert fac == DensePoly([GaussRat(Fraction(-1, 4)), GaussRat(0), GaussRat(0), GaussRat(0), GaussRat(1)]), fac.to_json()
# table uses P / (1 - 4 x^4)^38; match after normalizing to the constant term
P = res.num * GaussRat(4) ** 38
expect = {
    152: 70368744177664,
    148: 2446138493894656,
    144: 602576833522696192,
    140: 18202458634699407360,
    136: 269872182071578853376,
    12: 99008469176156160,
    8: 2152191452250112,
    4: 12957647896576,
    0: 1073741824,
}
scale = GaussRat(expect[0]) / P.coeff(0)
for k, v in expect.items():
    got = P.coeff(k) * scale
    assert got == GaussRat(v), (k, got.as_str_pair(), v)
print("massive n=10 table OK (scale 1/%s)" % (P.coeff(0) / GaussRat(expect[0])).as_str_pair()[0])

# primitive presentation sanity: num = unit * num_primitive
assert res.num == res.num_primitive * res.unit
zp = numerator_for_zeros(res)
assert zp is res.num_primitive

# ---- massless benchmark: symmetrized DW(2), q=3/5+4i/5, n=10
q = GaussRat.parse("3/5+4/5i")
params = CircuitParams(q=q, L=8, M=2, mode="exact")
t0 = time.time()
res2 = loschmidt_exact(st, params, 10)
t1 = time.time()
print(f"n=10 massless: {t1-t0:.2f}s  K={res2.ledger_k}  deg={res2.numerator_degree}")
assert res2.ledger_k == 38
assert res2.numerator_degree == 152
fac, e = res2.den_factors[0]
assert e == 38 and len(res2.den_factors) == 1
# primitive denominator base (3+4i)x^4 - (3-4i), compare through monic form
base = DensePoly([GaussRat(-3, 4), GaussRat(0), GaussRat(0), GaussRat(0), GaussRat(3, 4)])
assert fac == base.monic(), (fac.to_json(), base.monic().to_json())
P2 = res2.num * GaussRat(3, 4) ** 38
expect2 = {
    152: GaussRat(153512693941593170166015625, 329822301864624023437500000),
    148: GaussRat(-22961938008666038513183593750, 5381798744201660156250000000),
    144: GaussRat(-1106205148989260196685791015625, -3455163717927932739257812500000),
    8: GaussRat(-1106205148989260196685791015625, 3455163717927932739257812500000),
    4: GaussRat(-22961938008666038513183593750, -5381798744201660156250000000),
    0: GaussRat(153512693941593170166015625, -329822301864624023437500000),
}
scale2 = expect2[0] / P2.coeff(0)
for k, v in expect2.items():
    got = P2.coeff(k) * scale2
    assert got == v, (k, got.as_str_pair(), v.as_str_pair())
print("massless n=10 table OK")

# conjugate palindromy of the full numerator
for k in range(0, 153, 4):
    assert P2.coeff(k) == P2.coeff(152 - k).conj(), k

# ---- crosscap multi-sector exact vs oracle at L=8 (bigger case)
st_cc = build_initial_state("crosscap", 8)
params_cc = CircuitParams(q=GaussRat(2), L=8, M=0, mode="exact")
res_cc = loschmidt_exact(st_cc, params_cc, 2)
x0 = GaussRat.parse("1/3")
assert res_cc.evaluate(x0) == loschmidt_point_exact(st_cc, params_cc, x0, 2)
assert res_cc.evaluate(GaussRat(1)) == GaussRat(st_cc.norm2)
print(f"crosscap L=8 OK (norm2={st_cc.norm2}, sectors={st_cc.sector_numbers}, K={res_cc.ledger_k})")

# ---- timing probe for larger n (criterion 3 scale)
for nn in (40, 100):
    t0 = time.time()
    res_big = loschmidt_exact(st, CircuitParams(q=GaussRat(2), L=8, M=2, mode="exact"), nn)
    t1 = time.time()
    print(f"n={nn} massive: {t1-t0:.2f}s  K={res_big.ledger_k}  deg={res_big.numerator_degree}")
assert res_big.ledger_k == 398
assert res_big.numerator_degree == 1592
