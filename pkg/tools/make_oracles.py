"""Regenerate tests/oracle_values.json from closed forms at 50-digit precision.

Nothing here calls into specset: every value comes from a direct formula
(or a direct per-point evaluation) so the tests compare two independent
code paths. Run with ``python3 tools/make_oracles.py``.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parent.parent / "tests" / "oracle_values.json"


def f(x):
    return float(x)


def gc_direct(z, R, alpha, delta, c):
    w = delta / (z - alpha)
    return (z / R - c) / (1 - c * z / R) + (w - c) / (1 - c * w)


def gc_boundary_sup(R, alpha, delta, c, n):
    best = mp.mpf(0)
    for k in range(n):
        u = mp.expjpi(mp.mpf(2 * k) / n)
        for z in (R * u, alpha + delta * u):
            best = max(best, abs(gc_direct(z, R, alpha, delta, c)))
    return best


def main():
    o = {}
    a, r = mp.mpf("0.9"), mp.mpf("0.5")
    o["vn_extremal_lhs"] = f(a + (1 - a * a) * r / (1 - a * r))
    # 16x16 truncation keeps the terms n <= 15
    o["vn_extremal_lhs_trunc16"] = f(a + (1 - a * a) * mp.fsum(a ** (n - 1) * r ** n for n in range(1, 16)))
    o["T_lambda_defect"] = {str(lam): f(2 * mp.sqrt(1 - mp.mpf(lam) ** 2) - 2)
                            for lam in ("0.2", "0.6")}
    o["T_lambda_defect"]["1/3"] = f(2 * mp.sqrt(1 - mp.mpf(1) / 9) - 2)
    o["T_r_defect"] = {rr: f(1 + mp.sqrt(1 - mp.mpf(rr) ** 2) - mp.sqrt(4 - mp.mpf(rr) ** 2))
                       for rr in ("0.5", "0.9", "0.99")}
    o["bohr_radius"] = {aa: f(1 / (1 + 2 * mp.mpf(aa))) for aa in ("0.9", "0.99", "0.999")}
    o["bohr_radius_R5"] = {aa: f(5 / (1 + 2 * mp.mpf(aa))) for aa in ("0.9", "0.99", "0.999")}
    o["mobius_series_a05"] = [f(mp.taylor(lambda z: (mp.mpf("0.5") - z) / (1 - mp.mpf("0.5") * z), 0, 3)[k])
                              for k in range(4)]
    o["companion_roots"] = sorted(f(x.real) for x in mp.polyroots([1, -3, 2]))
    R, alpha, delta = mp.mpf(3), mp.mpf(2), mp.mpf("0.5")
    o["gc"] = {}
    for c in ("0.9", "0.99", "0.999", "0.9999"):
        cc = mp.mpf(c)
        lhs = abs(2 * cc + (1 - cc * cc) * delta / (alpha + delta * cc))
        o["gc"][c] = {"lhs": f(lhs), "sup_8192": f(gc_boundary_sup(R, alpha, delta, cc, 8192)),
                      "g_at_0": f(abs(gc_direct(mp.mpf(0), R, alpha, delta, cc)))}
    o["A_T_lambda_e1"] = f(mp.sqrt(1 - mp.mpf("0.36")))
    OUT.write_text(json.dumps(o, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
