"""Smoke test for the f13 extension module.

Build and stage the module first:

    cargo build --release -p f13-py
    cp target/release/libf13.so python/f13.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import f13  # noqa: E402


def check(label, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {label}")
    return ok


def main():
    results = []

    state = f13.FieldSet(mu=3.0, p=1.0, pi11=1.0, pi22=1.0)
    ricci = f13.ricci_spinor(state)
    results.append(check("special Ricci components", ricci.phi00 == 0.5 and ricci.phi11 == 1.0 and ricci.lambda_np == 0.0))
    results.append(check("trace-free completion", state["pi33"] == -2.0))

    weyl = f13.FieldSet(E11=1.0, E22=-1.0)
    psi = f13.weyl_spinor_components(weyl)
    results.append(check("Weyl components", psi[0] == 1 and psi[4] == 1 and not f13.is_conformally_flat(weyl)))
    results.append(check("vacuum is conformally flat", f13.is_conformally_flat(f13.FieldSet())))

    general = f13.FieldSet(mu=2.0, p=0.3, pi11=0.4, pi13=0.2, pi23=-0.1)
    r = f13.ricci_spinor(general)
    rotated = r.null_rotate(r.diagonalizing_rotation())
    results.append(check("null rotation fixes Phi00 and kills Phi01", rotated.phi00 == r.phi00 and abs(rotated.phi01) < 1e-14))

    inv = f13.elastic_invariants([[4.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    results.append(check("particle density", inv["n"] == 2.0 and inv["n_from_traces_sq"] == 4.0))

    pi11, p, udot3 = f13.a1_closure(0.1, 0.5)
    results.append(check("case A1 closure", abs(pi11 + 4.0 * p) < 1e-15 and udot3 == -0.5))
    a3 = 0.1 * math.sqrt(0.01 + 9.0)
    results.append(check("first integral", abs(f13.a1_first_integral(0.1, a3) - 1.0) < 1e-12))

    sample = f13.closed_form_a1(a=1.0, sign=1.0, b=1.0, z0=0.0, z1=1.0, n=200)
    results.append(check("closed form embeds", sample["max_residual"] < 1e-10 and sample["clip"] is None))
    clipped = f13.closed_form_a1(a=-5.0, sign=1.0, b=1.0, z0=0.0, z1=1.0, n=200)
    results.append(check("domain clip reported", clipped["clip"]["kind"] == "domain edge"))

    branch = f13.branch_family("half", constant=1.0, b=1.0, z0=0.0, z1=0.4, n=40)
    results.append(check("half branch is pressure-free", max(abs(v) for v in branch["p"]) < 1e-12))
    exact = [1.0 / (1.0 - 1.5 * z) for z in branch["z"]]
    results.append(check("half branch growth", max(abs(x - y) for x, y in zip(branch["a3"], exact)) < 1e-12))

    t = 1.0
    value = f13.FieldSet(mu=4.0 / (3.0 * t * t), theta=2.0 / t)
    d0 = f13.FieldSet(mu=-8.0 / (3.0 * t**3), theta=-2.0 / t**2)
    zero = f13.FieldSet()
    jet = f13.StateJet(t, value, [d0, zero, zero, zero])
    results.append(check("Einstein-de Sitter residuals", jet.max_residual() < 1e-12))

    if not all(results):
        sys.exit(1)
    print("all checks passed")


if __name__ == "__main__":
    main()
