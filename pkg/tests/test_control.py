import numpy as np
import pytest

from ovnn.control import (
    BRANCH_INNER,
    BRANCH_OUTER,
    BRANCH_ZERO,
    ControllerConfig,
    adaptive_branch,
    adaptive_update,
    fixed_controller,
    sign_band,
)


def test_sign_band():
    x = np.array([-2.0, -1e-4, 0.0, 1e-4, 3.0])
    np.testing.assert_array_equal(sign_band(x), [-1, -1, 0, 1, 1])
    np.testing.assert_array_equal(sign_band(x, 1e-3), [-1, 0, 0, 0, 1])


def test_fixed_controller_values():
    w = np.array([2.0, -0.5, 0.0])
    u = fixed_controller([3.0, 3.0, 3.0], [1.0, 1.0, 1.0], w)
    # -sign(w) (3 |w| + 1); no force at the target
    np.testing.assert_allclose(u, [-7.0, 2.5, 0.0])


def test_fixed_controller_rejects_nonpositive_gains():
    with pytest.raises(ValueError):
        fixed_controller([0.0], [1.0], [1.0])
    with pytest.raises(ValueError):
        fixed_controller([1.0], [-1.0], [1.0])


def test_branches():
    assert adaptive_branch(5.0, 1e-9) == BRANCH_OUTER
    assert adaptive_branch(1.0, 1e-9) == BRANCH_INNER
    assert adaptive_branch(0.5, 1e-9) == BRANCH_INNER
    assert adaptive_branch(1e-10, 1e-9) == BRANCH_ZERO
    # zero wins when the tolerance exceeds 1
    assert adaptive_branch(1.0, 2.0) == BRANCH_ZERO
    with pytest.raises(ValueError):
        adaptive_branch(1.0, 0.0)


@pytest.mark.parametrize(
    "sup, cur, mu, expected",
    [
        (3.0, 2.0, 4.0, (0.9 * 4.0 * 2.0, 0.0)),
        (0.8, 0.5, 4.0, (0.7 * 0.5, 0.6)),
        (0.0, 0.0, 4.0, (0.0, 0.0)),
    ],
)
def test_adaptive_update(sup, cur, mu, expected):
    rates = adaptive_update(1.0, 1.0, sup, cur, mu, c1=0.6, c2=0.9, c3=0.7)
    assert rates == pytest.approx(expected)


def test_adaptive_update_rejects_nonfinite():
    with pytest.raises(ValueError):
        adaptive_update(1.0, 1.0, float("nan"), 0.0, 1.0, 0.9, 0.9, 0.9)


def test_controller_config():
    assert ControllerConfig.none().variant == "none"
    cfg = ControllerConfig.fixed(np.ones((2, 8)), 2 * np.ones((2, 8)))
    d = cfg.to_dict()
    assert d["variant"] == "fixed" and np.asarray(d["kappa_hat"]).shape == (2, 8)
    with pytest.raises(ValueError):
        ControllerConfig.fixed(np.zeros((2, 8)), np.ones((2, 8)))
    with pytest.raises(ValueError):
        ControllerConfig.adaptive(-0.1, 0.9, 0.9)
    assert ControllerConfig.adaptive(0.9, 0.9, 0.9).to_dict()["c1"] == 0.9
