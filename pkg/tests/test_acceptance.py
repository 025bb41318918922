"""Acceptance criteria 1-14, all exact.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are also
repeated in the terminal summary.  Run directly with
``python tests/test_acceptance.py`` for the lines alone."""

import time

import pytest

from hecke2d.verify import run_verify

RESULTS = {}


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def suite(name, cases, **params):
    start = time.perf_counter()
    report = run_verify(name, seed=0, cases=cases, params=params)
    return report, time.perf_counter() - start


def failures(report, limit=3):
    return "; ".join(f"case {c.index}: {c.detail}" for c in report.failed[:limit])


def summary(report):
    return f"{report.passed}/{len(report.cases)} {report.suite} cases"


def test_criterion_01_measure_formula():
    report, secs = suite("measure-formula", 98)
    ok = report.ok and len(report.cases) == 98 and secs < 1
    assert record(1, ok, f"{summary(report)} over (i,j) in [-3,3]^2, q in {{2,3}}, {secs:.2f}s {failures(report)}")


def test_criterion_02_additivity():
    report, secs = suite("additivity", 100)
    ok = report.ok and secs < 5
    assert record(2, ok, f"{summary(report)}, {secs:.2f}s {failures(report)}")


def test_criterion_03_invariance():
    report, secs = suite("invariance", 200)
    assert record(3, report.ok, f"{summary(report)}, each checking translation and scaling {failures(report)}")


def test_criterion_04_fubini():
    r2, s2 = suite("fubini", 50, n=2)
    r3, s3 = suite("fubini", 50, n=3)
    ok = r2.ok and r3.ok and s2 < 30 and s3 < 30
    assert record(4, ok, f"n=2 {summary(r2)} {s2:.2f}s, n=3 {summary(r3)} {s3:.2f}s {failures(r2)}{failures(r3)}")


def test_criterion_05_change_of_variables():
    report, _ = suite("change-of-variables", 50)
    assert record(5, report.ok, f"{summary(report)}, diagonal and permuted monomial matrices {failures(report)}")


def test_criterion_06_gl_bridge():
    r1, _ = suite("gl-bridge", 10, n=1, q=2)
    r2, _ = suite("gl-bridge", 10, n=2, q=2)
    ok = r1.ok and r2.ok
    assert record(6, ok, f"n=1 {summary(r1)}, n=2 {summary(r2)}, q=2, level 1 {failures(r1)}{failures(r2)}")


def test_criterion_07_basic_function_closure():
    report, secs = suite("products", 100, points=1000)
    nonempty = sum(c.data.get("nonempty", False) for c in report.cases)
    ok = report.ok and secs < 120
    assert record(7, ok, f"{summary(report)} x 1000 points, {nonempty} nonempty products, {secs:.1f}s {failures(report)}")


def test_criterion_08_gl1_convolution():
    report, secs = suite("convolution", 20)
    ok = report.ok and secs < 1
    assert record(8, ok, f"e*e at q=2,3 and {summary(report)} graded pairs, {secs:.2f}s {failures(report)}")


def test_criterion_09_associativity():
    r1, s1 = suite("associativity", 20, n=1)
    r2, s2 = suite("associativity", 10, n=2, q=2, level=1)
    ok = r1.ok and r2.ok and s1 + s2 < 600
    nonzero = sum(c.data.get("nonzero", False) for c in r1.cases + r2.cases)
    assert record(9, ok, f"n=1 {summary(r1)}, n=2 {summary(r2)}, {nonzero} nonzero products, {s1 + s2:.1f}s "
                         f"{failures(r1)}{failures(r2)}")


def test_criterion_10_class_independence():
    r1, _ = suite("class-independence", 20, n=1, reps=10)
    r2, _ = suite("class-independence", 10, n=2, q=2, level=1, reps=10)
    classes = sum(c.data.get("classes", 0) for c in r1.cases + r2.cases)
    ok = r1.ok and r2.ok and classes >= 20
    assert record(10, ok, f"{classes} classes x 10 representatives, n=1 {summary(r1)}, n=2 {summary(r2)} "
                          f"{failures(r1)}{failures(r2)}")


def test_criterion_11_action():
    report, _ = suite("action", 20, n=1)
    assert record(11, report.ok, f"{summary(report)} at n=1 {failures(report)}")


def test_criterion_12_stabilizer():
    closed, _ = suite("stabilizer", 20, q=2, level=1)
    trivial, _ = suite("stabilizer-trivial", 10, q=2)
    ok = closed.ok and trivial.ok
    detail = (f"closed form vs exhaustive search {summary(closed)}; "
              f"trivial stabilizer for A != I {summary(trivial)} {failures(trivial, 1)}")
    assert record(12, ok, detail)


def test_criterion_13_oracle():
    report, _ = suite("oracle", 100)
    assert record(13, report.ok, f"{summary(report)}, measures and integrals {failures(report)}")


def test_criterion_14_double_coset():
    report, _ = suite("double-coset", 12, points=1000)
    checked = sum(c.data.get("checked", 0) for c in report.cases)
    ok = report.ok and checked >= 1000
    assert record(14, ok, f"{summary(report)}, {checked} points within the bound checked {failures(report)}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
