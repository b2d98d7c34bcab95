#!/usr/bin/env python3
"""Emit minimum-phase Daubechies lowpass filters (orders 1-10) as a C++ table.

Spectral factorization of the Daubechies polynomial at 60 digits; roots inside
the unit circle are kept. Output ordering matches
h = [(1+sqrt3), (3+sqrt3), (3-sqrt3), (1-sqrt3)] / (4 sqrt2) for order 2.
"""
import mpmath as mp

mp.mp.dps = 60


def daubechies(order):
    # P(y) = sum_k C(N-1+k, k) y^k with y = (2 - z - 1/z) / 4
    n = order
    # polynomial in z of degree 2(n-1): z^(n-1) * P(y(z))
    poly = [mp.mpf(0)] * (2 * n - 1)
    for k in range(n):
        c = mp.binomial(n - 1 + k, k)
        # y^k * z^(n-1) = ((-1)^k / 4^k) (z - 1)^(2k) z^(n-1-k)
        base = [mp.mpf(0)] * (2 * k + 1)
        for j in range(2 * k + 1):
            base[j] = mp.binomial(2 * k, j) * (-1) ** (2 * k - j)
        scale = c * (mp.mpf(-1) ** k) / mp.mpf(4) ** k
        for j, b in enumerate(base):
            poly[j + n - 1 - k] += scale * b
    q = [mp.mpf(1)]
    if n > 1:
        roots = mp.polyroots(list(reversed(poly)), maxsteps=500, extraprec=400)
        inside = [r for r in roots if abs(r) < 1]
        assert len(inside) == n - 1
        for r in inside:
            nq = [mp.mpc(0)] * (len(q) + 1)
            for i, a in enumerate(q):
                nq[i] += -r * a
                nq[i + 1] += a
            q = nq
    h = q
    for _ in range(n):
        nh = [mp.mpc(0)] * (len(h) + 1)
        for i, a in enumerate(h):
            nh[i] += a
            nh[i + 1] += a
        h = nh
    h = [mp.re(x) for x in h]
    s = sum(h)
    h = [x * mp.sqrt(2) / s for x in h]
    # Order so the leading tap is the largest-magnitude end.
    if abs(h[0]) < abs(h[-1]):
        h = list(reversed(h))
    return h


def main():
    print("// Generated by tools/gen_daubechies_filters.py")
    print("constexpr std::array<std::array<double, 20>, 10> kDaubechiesLowpass = {{")
    for order in range(1, 11):
        h = daubechies(order)
        vals = [mp.nstr(x, 21, min_fixed=-1, max_fixed=-1) for x in h]
        vals += ["0.0"] * (20 - len(vals))
        print("    {{" + ", ".join(vals) + "}},")
    print("}};")


if __name__ == "__main__":
    main()
