import numpy as np
import pytest

from randers_holonomy import DomainError, ModelVariant, PathSpec, holonomy_map, small_loop_generator, transport, transport_vector
from randers_holonomy.indicatrix import omega_closed_form, origin_chart
from randers_holonomy.model import finsler
from randers_holonomy.suites import rk4_ratio
from randers_holonomy.transport import ConvergenceError, Segment

SHEN = ModelVariant.shen(0.5, 1)
SQUARE = PathSpec.rectangle((0.0, 0.0), 0.2, 0.2)


def test_path_constructors():
    sq = SQUARE
    assert sq.closed and len(sq.segments) == 4 and sq.start == (0.0, 0.0)
    circ = PathSpec.circle((0.1, 0.0), 0.3)
    assert circ.closed and circ.start == pytest.approx((0.4, 0.0))
    line = PathSpec.polyline([(0, 0), (0.5, 0.1)])
    assert not line.closed
    with pytest.raises(ValueError):
        line.then(line)
    np.testing.assert_allclose(circ.segments[0].point(0.25), (0.1, 0.3), atol=1e-15)


def test_segment_velocity_is_derivative_of_point():
    seg = Segment("arc", (0.4, 0.0), (0.4, 0.0), (0.1, 0.0), 0.3, 0.0, 2 * np.pi)
    s, h = 0.37, 1e-6
    fd = (np.array(seg.point(s + h)) - np.array(seg.point(s - h))) / (2 * h)
    np.testing.assert_allclose(seg.velocity(s), fd, atol=1e-8)


def test_flat_transport_is_trivial():
    path = PathSpec.polyline([(0, 0), (1.5, -2.0), (3.0, 4.0)])
    np.testing.assert_allclose(transport_vector(ModelVariant.flat(0.7), path, [0.3, 0.8], 16), [0.3, 0.8], atol=1e-12)


@pytest.mark.parametrize("m", [SHEN, ModelVariant.shen(0.9, -1), ModelVariant.klein()], ids=str)
def test_finsler_norm_preserved(m):
    y0 = origin_chart(m).point(np.linspace(0, 2 * np.pi, 16, endpoint=False))
    res = transport(m, PathSpec.polyline([(0, 0), (0.4, 0.1), (-0.2, 0.5)]), y0, 256)
    assert res.drift < 1e-7
    np.testing.assert_allclose(finsler(m, [-0.2, 0.5], res.y), 1.0, atol=1e-8)


@pytest.mark.parametrize("path", [SQUARE, PathSpec.circle((0.1, 0.1), 0.3), PathSpec.polyline([(0, 0), (0.3, 0.6)])], ids=["square", "circle", "line"])
def test_reversibility(path):
    y0 = np.array([[0.3, -1.0], [0.8, 0.2]])
    y1 = transport_vector(SHEN, path, y0, 128)
    np.testing.assert_allclose(transport_vector(SHEN, path.reversed(), y1, 128), y0, atol=1e-8)


def test_transport_along_concatenation_is_sequential_transport():
    p1 = PathSpec.polyline([(0, 0), (0.3, 0.1)])
    p2 = PathSpec.polyline([(0.3, 0.1), (0.1, 0.4), (0, 0)])
    y0 = np.array([1.0, 0.2])
    direct = transport_vector(SHEN, p1.then(p2), y0, 64)
    step = transport_vector(SHEN, p2, transport_vector(SHEN, p1, y0, 64), 64)
    np.testing.assert_allclose(direct, step, atol=1e-15)


def test_transport_is_positively_homogeneous():
    y0 = np.array([0.4, -0.9])
    a = transport_vector(SHEN, SQUARE, 3.0 * y0, 64)
    np.testing.assert_allclose(a, 3.0 * transport_vector(SHEN, SQUARE, y0, 64), rtol=1e-12)


def test_rk4_order():
    assert 12.0 <= rk4_ratio(SHEN) <= 20.0
    assert 12.0 <= rk4_ratio(ModelVariant.klein()) <= 20.0


def test_argument_guards():
    with pytest.raises(ValueError):
        transport_vector(SHEN, SQUARE, [1.0, 0.0], 4)
    with pytest.raises(DomainError):
        transport_vector(SHEN, PathSpec.polyline([(0, 0), (1.2, 0)]), [1.0, 0.0], 16)
    with pytest.raises(ValueError):
        holonomy_map(SHEN, PathSpec.polyline([(0, 0), (0.1, 0)]))
    with pytest.raises(ValueError):
        holonomy_map(SHEN, SQUARE, samples=8)


# -- holonomy maps ------------------------------------------------------------


@pytest.fixture(scope="module")
def maps():
    return {
        "flat": holonomy_map(ModelVariant.flat(0.5), SQUARE, 64, 256),
        "klein": holonomy_map(ModelVariant.klein(), SQUARE, 64, 256),
        "shen": holonomy_map(SHEN, SQUARE, 64, 256),
    }


def test_trichotomy(maps):
    assert np.max(np.abs(maps["flat"].displacement)) < 1e-10
    assert np.std(maps["klein"].displacement, ddof=1) < 1e-6
    assert np.ptp(maps["shen"].displacement) > 1e-3


def test_klein_rotation_angle_is_curvature_times_area(maps):
    # Gauss-Bonnet for a small geodesic-free square: angle = -K * area to leading order, K = -1
    area = 0.04  # Euclidean area; the Klein area element is ~1 near the origin
    assert np.mean(maps["klein"].displacement) == pytest.approx(-area, rel=0.1)


def test_lifts_increase_and_close_up(maps):
    for hm in maps.values():
        assert hm.monotonicity_margin > 0
        assert hm.drift < 1e-7
        # the lift commutes with the 2 pi shift: displacement is periodic and continuous
        gaps = np.abs(np.diff(np.concatenate([hm.displacement, hm.displacement[:1]])))
        assert gaps.max() < 0.05


def test_empty_loop_gives_identity():
    hm = holonomy_map(SHEN, PathSpec.polyline([(0.0, 0.0)]), 32, 16)
    np.testing.assert_allclose(hm.displacement, 0.0, atol=1e-14)


def test_holonomy_at_other_base_point():
    loop = PathSpec.rectangle((0.3, -0.2), 0.1, 0.15)
    hm = holonomy_map(SHEN, loop, 32, 128)
    assert hm.monotonicity_margin > 0 and hm.drift < 1e-7
    assert np.ptp(hm.displacement) > 1e-4


def test_reversed_loop_inverts_the_map():
    hm = holonomy_map(SHEN, SQUARE, 32, 256)
    back = holonomy_map(SHEN, SQUARE.reversed(), 32, 256)
    # undo the forward map by interpolating the backward lift at the forward outputs
    ext_in = np.concatenate([back.t_in - 2 * np.pi, back.t_in, back.t_in + 2 * np.pi])
    ext_out = np.concatenate([back.t_out - 2 * np.pi, back.t_out, back.t_out + 2 * np.pi])
    from scipy.interpolate import CubicSpline

    undo = CubicSpline(ext_in, ext_out)(hm.t_out)
    np.testing.assert_allclose(undo, hm.t_in, atol=1e-5)


def test_summary_and_csv(maps, tmp_path):
    s = maps["shen"].summary()
    assert set(s) >= {"f_drift", "monotonicity_margin", "displacement_std"}
    maps["shen"].write_csv(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "t_in,t_out,displacement"


# -- small loops --------------------------------------------------------------


def test_small_loop_matches_omega_with_positive_sign():
    res = small_loop_generator(SHEN, 0.1, 64, 64)
    np.testing.assert_allclose(res.profile, omega_closed_form(SHEN, res.t), atol=5e-3)
    assert 0.5 < res.order < 2.5


def test_small_loop_flat_is_zero():
    res = small_loop_generator(ModelVariant.flat(0.5), 0.1, 32, 16)
    np.testing.assert_allclose(res.profile, 0.0, atol=1e-10)  # roundoff scaled by 1/h^2


def test_small_loop_klein_is_curvature_constant():
    res = small_loop_generator(ModelVariant.klein(), 0.1, 32, 32)
    np.testing.assert_allclose(res.profile, -1.0, atol=5e-3)


def test_small_loop_continuity_as_a1_vanishes():
    profiles = {}
    for a1 in (0.2, 0.1, 0.05, 0.0):
        m = ModelVariant.shen(a1, 1)
        profiles[a1] = small_loop_generator(m, 0.1, 32, 32).profile
    dev = [np.max(np.abs(profiles[a] + 0.25)) for a in (0.2, 0.1, 0.05, 0.0)]
    assert all(b < a for a, b in zip(dev, dev[1:]))
    assert dev[-1] < 5e-3


def test_small_loop_rejects_large_side():
    with pytest.raises(ValueError):
        small_loop_generator(SHEN, 0.2)


def test_convergence_error_is_raised_for_noise(monkeypatch):
    import importlib

    tr = importlib.import_module("randers_holonomy.transport")

    calls = iter([0.0, 1.0, 0.5])

    class Fake:
        def __init__(self, v):
            self.t_in = np.zeros(4)
            self.displacement = np.full(4, v)

    monkeypatch.setattr(tr, "holonomy_map", lambda *a, **k: Fake(next(calls)))
    with pytest.raises(ConvergenceError):
        tr.small_loop_generator(SHEN, 0.1)
