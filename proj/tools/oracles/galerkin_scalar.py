#!/usr/bin/env python3
"""Reference principal eigenvalue of a scalar periodic-parabolic problem.

    omega u_t - rho d u_xx - a(x, t) u = lambda u   on (0, L), Neumann, period 1,

with a(x, t) = sum_k c_k cos(k pi x / L) T_k(t) and T_k one of 1, cos(2 pi j t),
sin(2 pi j t). The operator is projected onto cos(k pi x / L) x exp(2 pi i m t),
k <= K, |m| <= T, which is exact for the differential part and closed up to
truncation for the multiplications. The principal eigenvalue is the one with
the smallest real part
in the strip |Im| < pi omega; it is real and converges spectrally in K and T.

Usage: galerkin_scalar.py OMEGA RHO D L TERM [TERM ...]
       TERM = amplitude,kx,kt,kind   kind in {const, cos, sin}
"""

import argparse
import sys

import numpy as np


def principal(omega, rho, d, length, terms, kmax, tmax):
    nx, nt = kmax + 1, 2 * tmax + 1

    def idx(k, m):
        return k * nt + (m + tmax)

    size = nx * nt
    op = np.zeros((size, size), dtype=complex)
    for k in range(nx):
        for m in range(-tmax, tmax + 1):
            op[idx(k, m), idx(k, m)] += 2j * np.pi * m * omega + rho * d * (k * np.pi / length) ** 2

    # Coefficient of cos(p x) * cos(q x) = (cos((p-q) x) + cos((p+q) x)) / 2 in
    # the cosine basis; negative modes fold back since cos is even.
    for amp, kx, kt, kind in terms:
        if kind == "const":
            tparts = [(0, 1.0 + 0j)]
        elif kind == "cos":
            tparts = [(kt, 0.5 + 0j), (-kt, 0.5 + 0j)] if kt else [(0, 1.0 + 0j)]
        elif kind == "sin":
            tparts = [(kt, -0.5j), (-kt, 0.5j)] if kt else []
        else:
            raise ValueError(f"unknown kind {kind}")
        xparts = [(0, 1.0)] if kx == 0 else [(kx, 0.5), (-kx, 0.5)]
        for k in range(nx):
            for m in range(-tmax, tmax + 1):
                for sx, cx in xparts:
                    kk = abs(k + sx)
                    if kk >= nx:
                        continue
                    for st, ct in tparts:
                        mm = m + st
                        if abs(mm) > tmax:
                            continue
                        op[idx(kk, mm), idx(k, m)] -= amp * cx * ct
    ev = np.linalg.eigvals(op)
    # Every eigenvalue has copies shifted by 2 pi i omega j; truncation perturbs
    # the shifted copies first, so keep the strip around the real axis.
    ev = ev[np.abs(ev.imag) < np.pi * omega]
    return ev[np.argmin(ev.real)].real


def parse_term(text):
    parts = [p.strip() for p in text.split(",")]
    return float(parts[0]), int(parts[1]), int(parts[2]), parts[3]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("omega", type=float)
    ap.add_argument("rho", type=float)
    ap.add_argument("d", type=float)
    ap.add_argument("length", type=float)
    ap.add_argument("terms", nargs="+")
    ap.add_argument("--kmax", type=int, default=32)
    ap.add_argument("--tmax", type=int, default=16)
    args = ap.parse_args()
    terms = [parse_term(t) for t in args.terms]
    coarse = principal(args.omega, args.rho, args.d, args.length, terms, args.kmax // 2, args.tmax // 2)
    fine = principal(args.omega, args.rho, args.d, args.length, terms, args.kmax, args.tmax)
    print(f"{fine:.15g}")
    print(f"# truncation check: |fine - coarse| = {abs(fine - coarse):.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
