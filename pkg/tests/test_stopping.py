import pytest

from exgap.bench.stopping import rpfgap, stagnated, stopping_check
from exgap.egap import TraceRow

NAN = float("nan")


def _row(k, rp, phi=1.0, f=NAN, g=NAN):
    return TraceRow(k=k, tau=NAN, beta1=NAN, beta2=NAN, delta=NAN, epsbar=NAN, feas=rp,
                    rpfgap=rp, phi=phi, sgap=NAN, ms=0.0, fval=f, gval=g)


def test_rpfgap_examples():
    assert rpfgap(5e-4, 2.0) == pytest.approx(2.5e-4)
    assert rpfgap(5e-4, 0.0) == 5e-4
    assert rpfgap(5e-4, 0.3) == 5e-4


def test_stagnation_needs_full_window():
    assert not stagnated([1.0] * 5, 1e-3)
    assert stagnated([1.0] * 6, 1e-3)
    assert not stagnated([1.0, 1.0, 1.0, 1.1, 1.0, 1.0], 1e-3)


def test_fewer_than_six_rows_cannot_stagnate():
    rows = [_row(k, 1e-4) for k in range(5)]
    assert not stopping_check(rows).stop
    rows.append(_row(5, 1e-4))
    assert stopping_check(rows).reason == "stagnation"


def test_gap_clause():
    assert stopping_check([_row(0, 1e-4, f=2.0, g=2.0005)]).reason == "gap"
    assert not stopping_check([_row(0, 1e-4, f=2.0, g=2.1)]).stop
    assert not stopping_check([_row(0, 1e-4, f=2.0, g=2.0)], use_gap=False).stop


def test_feasibility_required():
    assert not stopping_check([_row(0, 2e-3, f=1.0, g=1.0)]).stop
    assert not stopping_check([_row(0, NAN, f=1.0, g=1.0)]).stop


def test_empty_trace_rejected():
    with pytest.raises(ValueError):
        stopping_check([])
