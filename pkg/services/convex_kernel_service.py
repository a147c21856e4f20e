import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Settings
from models.convex_function import ConvexFunction
from models.dir_deriv_result import DirDerivResult
from models.exceptions import DomainError
from models.extended_real import ExtendedReal

logger = logging.getLogger(__name__)

DEFINITIONAL_STEPS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


class ConvexKernelService:
    """
    Ferramentas de análise convexa sobre os tipos do registro: avaliação,
    derivadas direcionais unilaterais, testes de pertinência a ∂φ, seção
    mínima, envelopes φ'_* / φ'^* e operador proximal.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    def eval(self, phi: ConvexFunction, u) -> ExtendedReal:
        """φ(u); +∞ exatamente quando u ∉ Dom(φ)."""
        return phi.value(u)

    def _require_domain(self, phi: ConvexFunction, u) -> np.ndarray:
        u = phi.as_point(u)
        if not phi.in_domain(u):
            raise DomainError(f"Ponto u={u.tolist()} fora de Dom(φ) para {phi.kind}.")
        return u

    # ------------------------------------------------------------------
    # Derivadas direcionais
    # ------------------------------------------------------------------

    def dir_deriv(self, phi: ConvexFunction, u, z, side: str, method: str = "auto") -> DirDerivResult:
        """
        φ'_−(u; z) ou φ'_+(u; z).

        Args:
            method: "auto" usa a forma fechada do tipo; "limit_sequence" força
                a sequência geométrica de quocientes.

        Raises:
            DomainError: Se u ∉ Dom(φ).
        """
        u = self._require_domain(phi, u)
        z = np.asarray(z, dtype=float).reshape(-1)
        if side not in ("minus", "plus"):
            raise ValueError(f"Lado inválido: {side}")
        if method == "auto":
            return DirDerivResult(phi.dir_deriv(u, z, side), "closed_form")
        if method != "limit_sequence":
            raise ValueError(f"Método desconhecido: {method}")
        return self._limit_sequence(phi, u, z, side)

    def _limit_sequence(self, phi, u, z, side) -> DirDerivResult:
        """
        Quociente (φ(u + tz) − φ(u))/t em t ∈ {t₀ρⁱ} (com sinal do lado).

        Pela monotonicidade do quociente a sequência é não crescente (lado +)
        ou não decrescente (lado −); a primeira violação indica erro de
        arredondamento e encerra a sequência.
        """
        s = self.settings
        if not np.any(z):
            return DirDerivResult(ExtendedReal(0.0), "limit_sequence", [])
        phi_u = float(phi.value(u))
        sign = 1.0 if side == "plus" else -1.0
        min_step = math.sqrt(np.finfo(float).eps) * (1.0 + np.linalg.norm(u)) / np.linalg.norm(z)
        steps = []
        previous = None
        for i in range(s.dir_deriv_steps):
            t = s.dir_deriv_t0 * s.dir_deriv_ratio ** i
            if steps and t < min_step:
                break
            value = phi.values((u + sign * t * z)[None, :])[0]
            quotient = sign * math.inf if math.isinf(value) else (value - phi_u) / (sign * t)
            if previous is not None:
                slack = 1e-12 * (1.0 + abs(previous))
                if (side == "plus" and quotient > previous + slack) or (side == "minus" and quotient < previous - slack):
                    break
                if abs(quotient) > s.dir_deriv_blowup and abs(quotient) > abs(previous) and math.isfinite(quotient):
                    steps.append(t)
                    infinite = ExtendedReal.plus_infinity() if quotient > 0 else ExtendedReal.minus_infinity()
                    return DirDerivResult(infinite, "limit_sequence", steps)
            steps.append(t)
            previous = quotient
        return DirDerivResult(ExtendedReal.from_float(previous), "limit_sequence", steps)

    def subdiff_interval_1d(self, phi: ConvexFunction, u: float) -> Tuple[ExtendedReal, ExtendedReal]:
        """
        (φ'_−(u), φ'_+(u)); ∂φ(u) = ℝ ∩ [lo, hi].

        Raises:
            ValueError: Se k ≠ 1.
        """
        if phi.k != 1:
            raise ValueError(f"subdiff_interval_1d exige k = 1 (recebido k={phi.k}).")
        lo = self.dir_deriv(phi, [u], [1.0], "minus").value
        hi = self.dir_deriv(phi, [u], [1.0], "plus").value
        return lo, hi

    # ------------------------------------------------------------------
    # Pertinência ao subdiferencial
    # ------------------------------------------------------------------

    def sample_directions(self, k: int, rng: np.random.Generator, n_random: Optional[int] = None) -> np.ndarray:
        """Vetores unitários ±eᵢ e ± pontos aleatórios da esfera."""
        n_random = self.settings.subdiff_random_directions if n_random is None else n_random
        axes = np.vstack([np.eye(k), -np.eye(k)])
        random = rng.normal(size=(n_random, k))
        random /= np.linalg.norm(random, axis=1, keepdims=True)
        return np.vstack([axes, random, -random])

    def subdiff_contains(self, phi: ConvexFunction, u, u_star, directions: Optional[np.ndarray] = None,
                         tol: Optional[float] = None, criterion: str = "minus", cross_check: bool = False) -> bool:
        """
        Teste amostrado de u* ∈ ∂φ(u).

        criterion="minus": ⟨u*, z⟩ ≥ φ'_−(u; z) − tol para todo z amostrado;
        criterion="plus": ⟨u*, z⟩ ≤ φ'_+(u; z) + tol.

        Raises:
            DomainError: Se u ∉ Dom(φ).
        """
        u = self._require_domain(phi, u)
        u_star = np.asarray(u_star, dtype=float).reshape(-1)
        tol = self.settings.subdiff_tol if tol is None else tol
        if directions is None:
            directions = self.sample_directions(phi.k, np.random.default_rng(0))
        if criterion not in ("minus", "plus"):
            raise ValueError(f"Critério desconhecido: {criterion}")
        result = True
        for z in directions:
            pairing = float(u_star @ z)
            bound = phi.dir_deriv(u, z, criterion)
            if criterion == "minus" and pairing < bound - tol:
                result = False
                break
            if criterion == "plus" and pairing > bound + tol:
                result = False
                break
        if cross_check:
            definitional = self.definitional_contains(phi, u, u_star, directions, tol=tol)
            if definitional != result:
                logger.debug("Testes de subgradiente divergem em u=%s, u*=%s.", u.tolist(), u_star.tolist())
        return result

    def definitional_contains(self, phi: ConvexFunction, u, u_star, directions: np.ndarray,
                              steps: Sequence[float] = DEFINITIONAL_STEPS, tol: Optional[float] = None) -> bool:
        """Desigualdade do subgradiente ⟨u*, y − u⟩ + φ(u) ≤ φ(y) + tol em y = u + s·z."""
        u = self._require_domain(phi, u)
        u_star = np.asarray(u_star, dtype=float).reshape(-1)
        tol = self.settings.subdiff_tol if tol is None else tol
        offsets = np.vstack([s * np.asarray(directions) for s in steps])
        phi_y = phi.values(u + offsets)
        phi_u = float(phi.value(u))
        inside = np.isfinite(phi_y)
        lhs = offsets[inside] @ u_star + phi_u
        return bool(np.all(lhs <= phi_y[inside] + tol))

    # ------------------------------------------------------------------
    # Prox, seção mínima e envelopes
    # ------------------------------------------------------------------

    def prox(self, phi: ConvexFunction, lam: float, v) -> np.ndarray:
        return phi.prox(lam, v)

    def minimal_section(self, phi: ConvexFunction, u) -> Tuple[Optional[np.ndarray], ExtendedReal]:
        """((∂φ)⁰(u), |∂φ|₀(u)); (None, +∞) quando ∂φ(u) = ∅."""
        u = phi.as_point(u)
        if not phi.in_dom_subdiff(u):
            return None, ExtendedReal.plus_infinity()
        vector = phi.minimal_section(u)
        return vector, ExtendedReal(np.linalg.norm(vector))

    def yosida_minimal_section(self, phi: ConvexFunction, u) -> Optional[np.ndarray]:
        """Limite de (u − prox(φ, λ, u))/λ quando λ ↓ 0."""
        return phi.yosida_section(u)

    def _envelope(self, phi, u, z, side, radii, n_samples, seed, method) -> ExtendedReal:
        u = phi.as_point(u)
        z = np.asarray(z, dtype=float).reshape(-1)
        if method == "auto" and phi.in_dom_subdiff(u):
            return phi.dir_deriv(u, z, side)
        radii = self.settings.envelope_radii if radii is None else list(radii)
        n_samples = self.settings.envelope_samples if n_samples is None else n_samples
        rng = np.random.default_rng(seed)
        k = phi.k
        best = None
        for radius in radii:
            candidates = [u[None, :], u + radius * np.eye(k), u - radius * np.eye(k)]
            if np.any(z):
                unit = z / np.linalg.norm(z)
                candidates.append(np.vstack([u + radius * unit, u - radius * unit]))
            directions = rng.normal(size=(n_samples, k))
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            lengths = radius * rng.random(size=(n_samples, 1)) ** (1.0 / k)
            candidates.append(u + directions * lengths)
            C = np.vstack(candidates)
            outside = ~phi.in_domain_batch(C)
            if np.any(outside):
                C[outside] = phi.prox(self.settings.envelope_prox_lambda, C[outside])
            kept = [c for c in C if phi.in_dom_subdiff(c)]
            if not kept:
                best = None
                continue
            derivs = [phi.dir_deriv(c, z, side) for c in kept]
            best = min(derivs) if side == "minus" else max(derivs)
        if best is None:
            raise DomainError(f"Nenhuma amostra de Dom(∂φ) encontrada no raio {radii[-1]} em torno de u={u.tolist()}.")
        return best

    def dir_deriv_liminf(self, phi: ConvexFunction, u, z, radii: Optional[Sequence[float]] = None,
                         n_samples: Optional[int] = None, seed: int = 0, method: str = "auto") -> ExtendedReal:
        """
        Aproximação de φ'_*(u; z) = liminf de φ'_−(v; z), v → u, v ∈ Dom(∂φ).

        Com method="auto" usa a forma fechada do registro (que coincide com
        φ'_−(u; z) em u ∈ Dom(∂φ)); method="sampled" usa o estimador por
        amostragem em bolas de raios decrescentes.
        """
        return self._envelope(phi, u, z, "minus", radii, n_samples, seed, method)

    def dir_deriv_limsup(self, phi: ConvexFunction, u, z, radii: Optional[Sequence[float]] = None,
                         n_samples: Optional[int] = None, seed: int = 0, method: str = "auto") -> ExtendedReal:
        """Espelho de dir_deriv_liminf com o máximo de φ'_+(v; z)."""
        return self._envelope(phi, u, z, "plus", radii, n_samples, seed, method)

    def moreau_envelope(self, phi: ConvexFunction, lam: float, v) -> float:
        """φ(prox(v)) + |v − prox(v)|²/(2λ)."""
        v = phi.as_point(v)
        p = phi.prox(lam, v)
        return float(phi.value(p)) + float((v - p) @ (v - p)) / (2.0 * lam)
