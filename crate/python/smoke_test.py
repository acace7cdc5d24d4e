"""Smoke test for the `stdmap` extension module.

Build and install first:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml
    python python/smoke_test.py
"""

import math

import stdmap


def close_on_torus(p, q, tol=1e-9):
    return all(min(abs(a - b), 1 - abs(a - b)) < tol for a, b in zip(p, q))


def main():
    f = stdmap.StandardMap(5.0)
    p = (0.123, 0.456)
    assert close_on_torus(f.apply_inverse(f.apply(p)), p)
    orbit = f.orbit(p, 10)
    assert len(orbit) == 11
    assert close_on_torus(f.orbit(orbit[-1], 10, backward=True)[-1], p, 1e-6)
    j = f.jacobian((0.0, 0.0))
    assert abs(j[0][0] * j[1][1] - j[0][1] * j[1][0] - 1.0) < 1e-12

    params = stdmap.Params(1000.0)
    assert abs(params.theta1 - 1000.0 ** -0.4) < 1e-15

    db = stdmap.find_periodic(5.0, 1)
    assert len(db) == 20, len(db)
    assert len(db.filter(1.0)) == 18
    audit = db.audit()
    assert audit["closure_violations"] == 0
    assert stdmap.PeriodicDatabase.from_json(db.to_json()).points() == db.points()

    counts = [(n, len(stdmap.find_periodic(5.0, n).filter(1.0))) for n in (1, 2, 3)]
    fit = stdmap.entropy_fit(counts)
    assert abs(fit["slope"] - math.log(20)) < 0.1 * math.log(20), fit

    lam = stdmap.lyapunov(100.0, (0.3, 0.7), 20_000)
    assert abs(lam - math.log(50 * math.pi)) < 0.2 * math.log(50 * math.pi), lam

    atoms = [(x, y) for x, y, *_ in stdmap.find_periodic(5.0, 3).filter(1.0).points()]
    coefs = stdmap.fourier_coefficients(atoms)
    assert abs(coefs[(0, 0)] - 1) < 1e-12
    assert stdmap.measure_distance(atoms, atoms) == 0.0
    dense, radius = stdmap.density_check(atoms, 0.2)
    assert dense and radius < 0.2

    assert stdmap.young_dimension(1.0, 1.0, -1.0) == 2.0
    assert stdmap.pliss_times([1.0] * 4, 0.0, 2.0, 0.5) == [0, 1, 2, 3]
    assert stdmap.homoclinically_related(1000.0, (0.0, 0.0), (0.5, 0.5)) == "related"

    try:
        stdmap.StandardMap(float("nan"))
    except ValueError:
        pass
    else:
        raise AssertionError("nan coupling accepted")

    print("stdmap smoke test passed")


if __name__ == "__main__":
    main()
