import logging
from collections import Counter
from typing import Optional

import numpy as np

from config.settings import Settings
from models.convex_function import ConvexFunction
from models.exceptions import SolverError
from models.extended_real import ExtendedReal
from models.reports import ConvexSuiteReport
from services.convex_kernel_service import ConvexKernelService

logger = logging.getLogger(__name__)

# tamanho da subamostra usada nos envelopes amostrados (mais caros)
ENVELOPE_EVERY = 20
ENVELOPE_SAMPLES = 16


def _scaled(tol: float, value: ExtendedReal) -> float:
    return tol * (1.0 + abs(value.value)) if value.is_finite() else tol


class ConvexVerificationService:
    """
    Bateria de leis da análise convexa sobre amostras semeadas:
    ordem e antissimetria das derivadas unilaterais, homogeneidade e
    subaditividade, finitude no interior, as relações entre pontos de
    Dom(φ), a equivalência dos testes de subgradiente, a monotonicidade
    de ∂φ e a não expansividade do prox.
    """

    def __init__(self, kernel: Optional[ConvexKernelService] = None, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.kernel = kernel or ConvexKernelService(self.settings)

    def verify_laws(self, phi: ConvexFunction, n_samples: Optional[int] = None, seed: int = 0,
                    tol: Optional[float] = None) -> ConvexSuiteReport:
        n = self.settings.convex_suite_samples if n_samples is None else n_samples
        tol = self.settings.convex_suite_tol if tol is None else tol
        rng = np.random.default_rng(seed)
        k = phi.k
        U = phi.sample_domain(rng, n)
        V = phi.sample_domain(rng, n)
        Zs = rng.normal(size=(n, k))
        axis_rows = rng.random(size=n) < 0.25
        Zs[axis_rows] = np.eye(k)[rng.integers(0, k, size=axis_rows.sum())] * rng.choice([-1.0, 1.0], size=(axis_rows.sum(), 1))

        report = ConvexSuiteReport(kind=phi.kind, n_samples=n, seed=seed)
        counts = Counter()
        agreements = 0
        compared = 0

        def violation(law, index, detail):
            report.violations.append({"law": law, "sample": int(index), "detail": detail})

        for i in range(n):
            u, v, z = U[i], V[i], Zs[i]
            try:
                self._directional_laws(phi, u, z, rng, tol, i, counts, violation)
                self._pair_laws(phi, u, v, tol, i, counts, violation)
                outcome = self._criteria_agreement(phi, u, rng, tol)
                if outcome is not None:
                    compared += 1
                    agreements += outcome
                self._prox_laws(phi, rng, tol, i, counts, violation)
                if i % ENVELOPE_EVERY == 0:
                    self._envelope_laws(phi, u, z, tol, i, counts, violation)
            except (ValueError, ArithmeticError, np.linalg.LinAlgError, SolverError) as e:
                violation("exception", i, f"{type(e).__name__}: {e}")

        report.criteria_agreement = agreements / compared if compared else 1.0
        report.laws_checked = dict(counts)
        if report.criteria_agreement < 0.99:
            violation("criteria_agreement", -1, f"concordância {report.criteria_agreement:.4f} < 0.99")
        logger.info("Suíte convexa %s: %d violações em %d amostras.", phi.kind, len(report.violations), n)
        return report

    def _directional_laws(self, phi, u, z, rng, tol, i, counts, violation):
        dm = phi.dir_deriv(u, z, "minus")
        dp = phi.dir_deriv(u, z, "plus")

        counts["order"] += 1
        if dm > dp + tol:
            violation("order", i, f"φ'_−={dm} > φ'_+={dp}")

        counts["antisymmetry"] += 1
        dm_neg = phi.dir_deriv(u, -z, "minus")
        if not dm_neg.close_to(-dp, _scaled(tol, dp)):
            violation("antisymmetry", i, f"φ'_−(u;−z)={dm_neg} ≠ −φ'_+(u;z)={-dp}")

        counts["homogeneity"] += 1
        t = rng.uniform(0.1, 10.0)
        scaled = phi.dir_deriv(u, t * z, "plus")
        if not scaled.close_to(t * dp, (1.0 + t) * _scaled(tol, dp)):
            violation("homogeneity", i, f"φ'_+(u;tz)={scaled} ≠ t·φ'_+(u;z)={t * dp}")

        z2 = rng.normal(size=phi.k)
        dp2 = phi.dir_deriv(u, z2, "plus")
        if dp.is_finite() and dp2.is_finite():
            counts["subadditivity"] += 1
            joint = phi.dir_deriv(u, z + z2, "plus")
            if joint > dp + dp2 + tol * (1.0 + abs(dp.value) + abs(dp2.value)):
                violation("subadditivity", i, f"φ'_+(u;z₁+z₂)={joint} > {dp + dp2}")

        delta = 1e-3
        if phi.in_domain(u + delta * z) and phi.in_domain(u - delta * z):
            counts["interior_finiteness"] += 1
            if not (dm.is_finite() and dp.is_finite()):
                violation("interior_finiteness", i, f"derivadas infinitas no interior: ({dm}, {dp})")

    def _pair_laws(self, phi, u, v, tol, i, counts, violation):
        w = u - v
        counts["pair_order"] += 1
        left = phi.dir_deriv(u, w, "minus")
        right = phi.dir_deriv(v, w, "plus")
        if left < right - _scaled(tol, right):
            violation("pair_order", i, f"φ'_−(u;u−v)={left} < φ'_+(v;u−v)={right}")

        mu = phi.minimal_section(u)
        mv = phi.minimal_section(v)
        if mu is not None and mv is not None:
            counts["monotonicity"] += 1
            pairing = float((mu - mv) @ w)
            if pairing < -tol * (1.0 + np.linalg.norm(w)):
                violation("monotonicity", i, f"⟨u*−v*, u−v⟩={pairing}")

    def _criteria_agreement(self, phi, u, rng, tol):
        mu = phi.minimal_section(u)
        if mu is None:
            return None
        if rng.random() < 0.5:
            u_star = mu
        else:
            xi = rng.normal(size=phi.k)
            u_star = mu + 0.5 * xi / np.linalg.norm(xi)
        directions = self.kernel.sample_directions(phi.k, rng)
        minus = self.kernel.subdiff_contains(phi, u, u_star, directions, tol, criterion="minus")
        plus = self.kernel.subdiff_contains(phi, u, u_star, directions, tol, criterion="plus")
        definitional = self.kernel.definitional_contains(phi, u, u_star, directions, tol=tol)
        return minus == plus == definitional

    def _prox_laws(self, phi, rng, tol, i, counts, violation):
        w1 = rng.normal(scale=3.0, size=phi.k)
        w2 = rng.normal(scale=3.0, size=phi.k)
        lam = rng.uniform(0.1, 2.0)
        p1 = phi.prox(lam, w1)
        p2 = phi.prox(lam, w2)

        counts["nonexpansive"] += 1
        if np.linalg.norm(p1 - p2) > np.linalg.norm(w1 - w2) + tol:
            violation("nonexpansive", i, f"|prox(v)−prox(w)|={np.linalg.norm(p1 - p2)} > |v−w|")

        counts["prox_residual"] += 1
        if not phi.in_domain(p1):
            violation("prox_residual", i, "prox(v) fora de Dom(φ)")
            return
        residual = (w1 - p1) / lam
        directions = self.kernel.sample_directions(phi.k, rng)
        if not self.kernel.subdiff_contains(phi, p1, residual, directions, tol):
            violation("prox_residual", i, "(v − prox(v))/λ ∉ ∂φ(prox(v))")

    def _envelope_laws(self, phi, u, z, tol, i, counts, violation):
        if not phi.in_dom_subdiff(u):
            return
        counts["envelopes"] += 1
        lower = self.kernel.dir_deriv_liminf(phi, u, z, n_samples=ENVELOPE_SAMPLES, seed=i, method="sampled")
        upper = self.kernel.dir_deriv_limsup(phi, u, z, n_samples=ENVELOPE_SAMPLES, seed=i, method="sampled")
        dm = phi.dir_deriv(u, z, "minus")
        dp = phi.dir_deriv(u, z, "plus")
        if lower > dm + _scaled(tol, dm):
            violation("envelopes", i, f"φ'_*={lower} > φ'_−={dm}")
        if upper < dp - _scaled(tol, dp):
            violation("envelopes", i, f"φ'^*={upper} < φ'_+={dp}")
