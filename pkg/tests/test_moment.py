import math

import mpmath as mp
import numpy as np
import pytest

from zetaladder.errors import DomainError
from zetaladder.moment import F_BASE, T0, MomentCache, MomentFunction
from zetaladder.quadrature import QuadratureSpec, integrate_weighted
from zetaladder.rs import zeta_mod_sq

from oracles import integral

EULER_GAMMA = 0.5772156649015329


def test_base_value_against_mpmath():
    ref = integral(lambda t: mp.siegelz(t) ** 2, 0, 10, pieces=20, dps=25)
    assert F_BASE == pytest.approx(ref, rel=1e-14)


def test_F_at_base_point(moment):
    assert moment.F(T0) == F_BASE


def test_F_against_direct_quadrature(moment):
    a, b = 200.0, 314.0
    direct = integrate_weighted(a, b, zeta_mod_sq)
    assert moment.F(b) - moment.F(a) == pytest.approx(direct, rel=1e-12)


def test_F_short_range_against_mpmath(moment):
    ref = integral(lambda t: mp.siegelz(t) ** 2, 10, 40, pieces=60)
    assert moment.F(40.0) - F_BASE == pytest.approx(ref, rel=1e-10)


def test_F_classical_asymptotic(moment):
    T = 1000.0
    main = T * math.log(T / (2 * math.pi)) + (2 * EULER_GAMMA - 1) * T
    assert moment.F(T) == pytest.approx(main, rel=0.02)


def test_F_vectorized_and_monotone(moment):
    ts = np.linspace(10.0, 1500.0, 301)
    vals = moment.F(ts)
    assert vals.shape == ts.shape
    assert np.all(np.diff(vals) > 0)
    assert moment.F(float(ts[37])) == vals[37]


def test_inverse_round_trip(moment):
    x = moment.inverse(moment.F(777.77), 10.0)
    assert x == pytest.approx(777.77, rel=1e-13)


def test_domain():
    with pytest.raises(DomainError):
        MomentFunction().F(5.0)


def test_cache_roundtrip(tmp_path):
    path = str(tmp_path / "m.txt")
    m = MomentFunction(path=path)
    m.extend_to(500.0)
    again = MomentCache.load(path)
    assert again.status == "loaded"
    assert again.values == m.cache.values
    assert MomentFunction(cache=again).F(432.1) == m.F(432.1)


def test_foreign_header_is_ignored(tmp_path):
    path = str(tmp_path / "m.txt")
    MomentFunction(path=path).extend_to(300.0)
    other = MomentCache.load(path, QuadratureSpec(rel_tol=1e-6))
    assert other.status == "ignored"
    assert other.values == [F_BASE]


def test_missing_cache(tmp_path):
    cache = MomentCache.load(str(tmp_path / "none.txt"))
    assert cache.status == "missing"
    assert cache.heights == [T0]
