#!/usr/bin/env python3
"""Smoke test for the qroots_py extension module.

Builds nothing itself: run `cargo build -p qroots-py` (or --release) first.
The script locates the compiled cdylib under target/, stages it under a
temporary directory as an importable module, and checks a handful of known
values end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    names = ["libqroots_py.so", "libqroots_py.dylib", "qroots_py.dll"]
    candidates = []
    for profile in ("release", "debug"):
        for name in names:
            p = ROOT / "target" / profile / name
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit("build the extension first: cargo build -p qroots-py")
    return max(candidates, key=lambda p: p.stat().st_mtime)


def main() -> None:
    lib = locate_library()
    staging = Path(tempfile.mkdtemp(prefix="qroots-py-"))
    suffix = ".so" if lib.suffix != ".dll" else ".pyd"
    shutil.copy2(lib, staging / f"qroots_py{suffix}")
    sys.path.insert(0, str(staging))

    import qroots_py as q

    # Exact modular arithmetic.
    assert q.jacobi(-1, 5) == 1
    assert q.jacobi(-1, 3) == -1
    assert q.jacobi(0, 7) == 0
    assert q.sqrt_mod_p(-1, 13) == [5, 8]
    assert q.roots_mod_prime_power(1, 1, 5, 2) == [7, 18]
    assert q.roots_mod_k(1, 1, 65) == [8, 18, 47, 57]
    assert q.rho(1, 1, 65) == 4
    assert q.factorize(10001) == [(73, 1), (137, 1)]
    assert q.gpf(10001) == 137
    assert q.is_prime(101) and not q.is_prime(10001)

    # Lattice machinery.
    assert q.act((0, -1, 1, 0), (1, 0, 2)) == (2, 0, 1)
    assert q.c_transform((1, 0, 1, 1), (1, 2, 3)) == 8
    reduced, transform = q.reduce((1, 0, 5))
    assert reduced == (5, 0, 1, 1)
    assert transform[0] * transform[3] - transform[1] * transform[2] == 1
    assert q.heegner_points(5) == [(5, 0, 1, 1), (3, 1, 2, 1)]
    assert q.heegner_points(1) == [(1, 0, 1, 2)]
    assert len(q.coset_reps(6)) == 12
    assert abs(q.u_invariant((0.0, 2.0), (0.0, 1.0)) - 0.125) < 1e-12
    assert q.u_skewed((1.0, 0.0, 0.0, 1.0), 3.0) == 0.0

    # Parametrizations.
    assert q.hecke_orbits(2) == [(2, 0, 1), (1, 0, 2), (1, 1, 2)]
    sigma, base = q.cube_decompose((1, 0, 8), 2, 2, 1, 1)
    assert sigma == (2, 0, 1) and base == (1, 0, 2)
    for report in (
        q.verify_para1(1, 1, 1, 20),
        q.verify_para2(1, 1, 1, 2, 3, 25),
        q.verify_para3(1, 2, 2, 1, 40),
    ):
        assert report["passes"], report
    avg = q.hecke_apply(4, lambda m: 1.0, (1.0, 0.0, 0.0, 1.0))
    assert abs(avg - 7.0 / 2.0) < 1e-9  # sigma(4) / sqrt(4)

    # Experiments.
    assert abs(q.bump_integral(-1.0, 1.0, 1.0) - 0.4440) < 1e-4
    assert q.bump_eval(-1.0, 1.0, 1.0, 1.0) == 0.0
    eq = q.equidist(2000, 1, 1, [(0.0, 0.5), (0.5, 1.0)])
    assert eq["rows"][0]["count"] + eq["rows"][1]["count"] == eq["rho_sum"]
    re, im, terms = q.weyl_sum(2000, 1, 1, 0)
    assert terms == eq["rho_sum"] and abs(im) < 1e-9
    s, primes = q.hypothesis_sum(1, 1, 2, 100)
    assert primes == 25 and 0.0 < s < q.hypothesis_bound(2, 100, 0.1)
    cheb = q.chebyshev_identity(50, 1, 1)
    assert cheb["multisets_equal"]
    scan = q.gpf_scan(10, 1, 1)
    assert scan["max_gpf"] >= 401
    t1 = q.type1(200, 200, 10, 1, 1, 7.0 / 64.0)
    assert len(t1["rows"]) == 10 and t1["target_bound"] > 0
    t2 = q.type2(200, 40, 5, 1, 1, 7.0 / 64.0, False)
    assert math.isfinite(t2["total_error"])
    kh = q.kernel_heegner(1, 1, 1, 0.01)
    assert abs(kh["total"] - 1.0) < 1e-12
    kl = q.kernel_lowertriang(1, 1, 1, 1, 1, 1, 0.0, 1.0)
    assert abs(kl["total"] - 8.0) < 1e-12
    assert q.rho_cubic(1, 1, 1, 5) == 2
    assert q.rho_cubic_complete_sum(1, 1, 30) == 30
    yp = q.ypoisson_check(1, 1, 30, 1000, 0.5)
    assert yp["complete_sum"] == 30
    xr = q.x2y3_type_i2(1000, 30, 5, 1, 2, 31, 10, 0.5)
    assert math.isfinite(xr["ratio_to_bound"])

    print("qroots_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
