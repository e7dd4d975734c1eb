#!/usr/bin/env python3
"""Smoke test for the mulambda_py extension module.

Build the extension first:

    cargo build -p mulambda-py

then run this script with the same Python the build configured:

    python3 python/smoke_test.py
"""

import shutil
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent

OMEGA = "((lambda (x) (x x)) (lambda (x) (x x)))"
OMEGA3 = "((lambda (x) (x x x)) (lambda (x) (x x x)))"


def find_extension():
    candidates = []
    for profile in ("debug", "release"):
        for name in ("libmulambda_py.so", "libmulambda_py.dylib", "mulambda_py.dll"):
            candidates.append(REPO_ROOT / "target" / profile / name)
    for path in candidates:
        if path.exists():
            return path
    sys.exit(
        "extension not built; run `cargo build -p mulambda-py` first "
        f"(looked in {REPO_ROOT / 'target'})"
    )


def load_module():
    built = find_extension()
    staging = Path(tempfile.mkdtemp(prefix="mulambda-py-"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, staging / f"mulambda_py{suffix}")
    sys.path.insert(0, str(staging))
    import mulambda_py

    return mulambda_py


def main():
    m = load_module()
    checks = 0

    def check(label, got, want):
        nonlocal checks
        if got != want:
            sys.exit(f"FAIL {label}: got {got!r}, want {want!r}")
        checks += 1
        print(f"ok {label}: {got!r}")

    check("interpret arithmetic", m.interpret("(+ 2 3)"), "5")
    check("interpret pair", m.interpret("(pair (* 2 3) #t)"), "(pair 6 #t)")

    try:
        m.interpret(OMEGA, fuel=1000)
        sys.exit("FAIL omega fuel: expected an exception")
    except RuntimeError as e:
        check("interpret omega exhausts fuel", "fuel" in str(e), True)

    check("parse tree dump", "lambda x" in m.parse_tree("(lambda (x y) x)"), True)
    check("syntax dot", m.syntax_dot("42").startswith("digraph"), True)

    dag = m.Dag("(+ 2 3)")
    check("reduce arithmetic", dag.reduce(), "5")
    check("reduce agrees with interpret", dag.printed(), m.interpret("(+ 2 3)"))

    omega = m.Dag(OMEGA)
    check("omega normalizes", omega.reduce(), "<apply>")
    check("omega rule firings stay small", omega.rule_firings() < 100, True)

    omega3 = m.Dag(OMEGA3)
    check("omega3 builds a mu", omega3.reduce(), "<mu>")
    check("omega3 dot mentions mu", "mu" in omega3.to_dot(), True)

    church_sum = m.Dag(
        "((lambda (m n s z) (m s (n s z)))"
        " (lambda (s z) (s (s z)))"
        " (lambda (s z) (s (s (s z)))))"
    )
    church_sum.reduce()
    church_five = m.Dag("(lambda (s z) (s (s (s (s (s z))))))")
    church_five.reduce()
    check("church 2+3 is church 5", church_sum.alpha_equal(church_five), True)

    port = m.Dag("((lambda (x) x) (delta in))")
    port.bind_ports({"in": "9"})
    check("bound port reduces to the sample", port.reduce(), "9")

    open_port = m.Dag("((lambda (x) x) (delta in))")
    check("unbound port survives", open_port.reduce(), "<delta in>")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
