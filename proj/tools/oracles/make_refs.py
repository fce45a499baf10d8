#!/usr/bin/env python3
"""Regenerates the checked-in reference files fixtures/*.ref.

Every value comes from the independent oracles in this directory:
limit_constants.py (closed-form constants on the sample grid) and
galerkin_scalar.py (spectral reference for the separable fixture).
Run from the repository root: python3 tools/oracles/make_refs.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
import galerkin_scalar  # noqa: E402
import limit_constants  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIXTURES = ROOT / "fixtures"

SEPARABLE_POINT = (0.3, 1.0)   # (omega, rho)
SEPARABLE_A0 = np.array([[0.0, 1.0], [1.0, -1.0]])
SEPARABLE_TERMS = [(1.0, 1, 1, "cos")]


def write(name, lines, sources):
    path = FIXTURES / f"{name}.ref"
    head = [f"# generated by tools/oracles/make_refs.py from {s}" for s in sources]
    path.write_text("\n".join(head + lines) + "\n")
    print(f"wrote {path.relative_to(ROOT)}")


def constants_lines(cfg):
    c = limit_constants.constants(*limit_constants.field(limit_constants.parse(cfg)))
    return c, [f"{k} = {v:.15g}" for k, v in c.items()]


def main():
    for cfg in sorted(FIXTURES.glob("*.cfg")):
        name = cfg.stem
        if name == "mutation_invalid":
            continue
        c, lines = constants_lines(cfg)
        sources = ["limit_constants.py"]
        if name.startswith("mutation_"):
            verdict = "empty" if c["C_under"] >= 0 else "full" if c["C_bar"] <= 0 else "bounded-by-curve"
            lines += [f"verdict = {verdict}", f"case = {limit_constants.region_case(c) if verdict == 'bounded-by-curve' else 0}"]
        if name == "separable":
            omega, rho = SEPARABLE_POINT
            scalar = galerkin_scalar.principal(omega, rho, 1.0, 1.0, SEPARABLE_TERMS, 32, 16)
            mu0 = np.linalg.eigvalsh(SEPARABLE_A0)[-1]
            lines += [f"omega = {omega:g}", f"rho = {rho:g}", f"lambda_scalar = {scalar:.15g}",
                      f"mu_A0 = {mu0:.15g}", f"lambda = {scalar - mu0:.15g}"]
            sources.append("galerkin_scalar.py (K = 32, T = 16)")
        write(name, lines, sources)


if __name__ == "__main__":
    main()
