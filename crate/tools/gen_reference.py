"""Regenerates the reference tables in crates/core/tests/data with mpmath."""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"


def faddeeva(z):
    return mp.exp(-z * z) * mp.erfc(-1j * z)


def lin(lo, hi, n):
    return [lo + (hi - lo) * mp.mpf(i) / (n - 1) for i in range(n)]


def g17(x):
    return mp.nstr(x, 17, min_fixed=1, max_fixed=0)


def faddeeva_grid():
    rows = ["re,im,w_re,w_im"]
    for x in lin(-10, 10, 20):
        for y in lin(-10, 10, 25):
            w = faddeeva(mp.mpc(x, y))
            rows.append(",".join(g17(v) for v in (x, y, w.real, w.imag)))
    return rows


def kernel_grid():
    rows = ["a,b,k"]
    for a in lin(mp.mpf("0.01"), 5, 25):
        for b in lin(0, 5, 21):
            k = -mp.exp(-b * b) * faddeeva(mp.mpc(-a, b)).imag
            rows.append(",".join(g17(v) for v in (a, b, k)))
    return rows


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, rows in [("faddeeva_grid.csv", faddeeva_grid()), ("boundary_kernel.csv", kernel_grid())]:
        (OUT / name).write_text("\n".join(rows) + "\n")
        print(name, len(rows) - 1)
