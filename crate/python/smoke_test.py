"""Smoke test for the compiled `freeqg` extension."""

from fractions import Fraction

import freeqg


def main() -> None:
    assert [freeqg.dim_irrep(k, 3) for k in range(4)] == [1, 3, 8, 21]
    assert freeqg.q_int(5, 2) == 5

    g = freeqg.gram(4, 3)
    assert g == [[9, 3], [3, 9]]
    wg = freeqg.weingarten(4, 3)
    for i in range(2):
        for j in range(2):
            assert sum(wg[i][t] * g[t][j] for t in range(2)) == (1 if i == j else 0)

    assert freeqg.haar_moment("x[1,1]*x[1,1]", 5) == Fraction(1, 5)
    assert freeqg.haar_moment("x[1,1]^4", 3) == Fraction(1, 6)
    assert freeqg.free_moment("x[1,1]^4") == 2
    assert freeqg.free_moment("v[1,1]*v*[1,1]*v[1,1]*v*[1,1]", "u+") == 2

    a = freeqg.Polynomial("x[1,1]")
    n = 4
    norm = a.scaled(n).lp_norm(4, n)
    assert norm["moment"] == Fraction(2 * n, n + 1)
    lo, hi = norm["value"]
    assert lo ** 4 <= norm["moment"] <= hi ** 4
    assert freeqg.Polynomial("x[1,1]").lp_norm(4)["moment"] == 2

    b = freeqg.dn_constant(3, r_max=16, side_max=8)
    lo, hi = b["value"]
    assert 1 <= lo <= hi <= b["upper"]
    assert abs(float(lo) - 1.299155134707888) < 1e-12

    m, p = freeqg.select_p(2, "0.5")
    assert (m, p) == (8, 32)

    report = freeqg.rd_check(freeqg.Polynomial("x[1,1] + x[1,2]").scaled(5), 5, [2, 4, 6])
    assert report["holds"] and len(report["rows"]) == 3

    try:
        freeqg.haar_moment("x[4,1]*x[4,1]", 3)
    except ValueError:
        pass
    else:
        raise AssertionError("index above N must be rejected")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
