import numpy as np
import pytest

import gkcp


def mean_shift(n=120, d=5, shift=2.0, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    x[n // 2 :] += shift
    return x


def test_fast_tests_find_a_mean_shift():
    g = gkcp.build_gram(mean_shift())
    for test in (gkcp.fgkcp1, gkcp.fgkcp2):
        r = test(g)
        assert r["rejected"]
        assert abs(r["estimated_change"] - 60) <= 3


def test_scan_identity():
    g = gkcp.build_gram(mean_shift(shift=0.0))
    s = gkcp.scan(g)
    assert np.allclose(s["gkcp"], s["z_d"] ** 2 + s["z_w"][1.0] ** 2, rtol=1e-8)
    assert s["t"][0] == 6 and s["t"][-1] == 114


def test_median_heuristic_matches_numpy():
    x = mean_shift(n=30, seed=3)
    i, j = np.triu_indices(30, 1)
    assert gkcp.median_heuristic(x) == pytest.approx(np.median(np.linalg.norm(x[i] - x[j], axis=1)))
    assert gkcp.build_gram(x).bandwidth == pytest.approx(gkcp.median_heuristic(x))


def test_permutation_test_is_seeded():
    g = gkcp.build_gram(mean_shift(shift=0.0, seed=5))
    a = gkcp.permutation_test(g, n_perm=50, seed=7)
    b = gkcp.permutation_test(g, n_perm=50, seed=7)
    assert a["p"] == b["p"] and a["draws"] == b["draws"]
    assert 0.0 < a["p"] <= 1.0


def test_kernel_input_matches_points():
    x = mean_shift(n=40, seed=2)
    g = gkcp.build_gram(x)
    k = gkcp.Gram.from_kernel(g.kernel)
    assert gkcp.fgkcp1(k)["combined_p"] == pytest.approx(gkcp.fgkcp1(g)["combined_p"], rel=1e-10)


def test_generate_and_segment():
    x = gkcp.generate("gaussian_type1", d=20, n=200, delta=4.0, seed=1)
    assert x.shape == (200, 20)
    tree = gkcp.segment(x)
    assert 100 in tree["change_points"]
    assert tree["nodes"][0]["change"] == 100


def test_errors_raise():
    with pytest.raises(gkcp.GkcpError):
        gkcp.build_gram(np.ones((10, 3)))
    with pytest.raises(gkcp.GkcpError):
        gkcp.generate("nope")
