import numpy as np
import pytest

from models.indicator_functions import IndicatorBall, IndicatorBox, IndicatorHalfspace
from models.norm_functions import EuclideanNorm, Quadratic, SeparableAbs, Zero
from models.piecewise_functions import MaxOfAffine, ScaledSum
from services.convex_verification_service import ConvexVerificationService

suite = ConvexVerificationService()

REGISTRO = [
    Zero(2),
    SeparableAbs(2),
    EuclideanNorm(3),
    Quadratic([[2.0, 0.5], [0.5, 1.0]]),
    IndicatorBox([0.0, -1.0], [np.inf, 1.0]),
    IndicatorBall([1.0, 0.0], 2.0),
    IndicatorHalfspace([1.0, 1.0], 1.0),
    MaxOfAffine([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]], [0.0, 0.0, -1.0]),
    ScaledSum([(1.0, SeparableAbs(1)), (0.5, Quadratic([[1.0]]))]),
]


@pytest.mark.parametrize("phi", REGISTRO, ids=lambda phi: phi.kind)
def test_leis_convexas_sem_violacoes(phi):
    report = suite.verify_laws(phi, n_samples=200, seed=7)
    assert report.violations == []
    assert report.passed
    assert report.criteria_agreement >= 0.99
    assert report.laws_checked["pair_order"] == 200


def test_leis_valor_absoluto_mil_amostras():
    report = suite.verify_laws(SeparableAbs(1), n_samples=1000, seed=1)
    assert report.passed
    assert report.n_samples == 1000


def test_quadratica_negada_viola_monotonicidade():
    broken = Quadratic([[-1.0, 0.0], [0.0, -1.0]], check_psd=False)
    report = suite.verify_laws(broken, n_samples=100, seed=2)
    assert not report.passed
    laws = {v["law"] for v in report.violations}
    assert "monotonicity" in laws


def test_relatorio_deterministico_pela_semente():
    phi = EuclideanNorm(2)
    a = suite.verify_laws(phi, n_samples=50, seed=5).to_dict()
    b = suite.verify_laws(phi, n_samples=50, seed=5).to_dict()
    assert a == b
