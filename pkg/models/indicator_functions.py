# models/indicator_functions.py
import numpy as np

from models.convex_function import DOMAIN_TOL, ConvexFunction, encode_bound
from models.extended_real import ExtendedReal
from models.norm_functions import check_side


def _leaves(side: str, outward_plus: bool, outward_minus: bool) -> ExtendedReal:
    """Derivada de uma indicatriz: ±∞ quando a semirreta sai do conjunto, 0 caso contrário."""
    if side == "plus":
        return ExtendedReal.plus_infinity() if outward_plus else ExtendedReal(0.0)
    return ExtendedReal.minus_infinity() if outward_minus else ExtendedReal(0.0)


class IndicatorBox(ConvexFunction):
    """
    Indicatriz da caixa Πᵢ[aᵢ, bᵢ], limites possivelmente infinitos.

    Conjunto convexo, fechado e não vazio (aᵢ ≤ bᵢ), logo a indicatriz é
    convexa, própria e s.c.i.; prox é a projeção coordenada a coordenada.
    """

    kind = "indicator_box"

    def __init__(self, lower, upper, k: int = None):
        lower = np.asarray(lower, dtype=float).reshape(-1)
        upper = np.asarray(upper, dtype=float).reshape(-1)
        if k is None:
            k = max(lower.size, upper.size)
        lower = np.broadcast_to(lower, (k,)).copy() if lower.size == 1 else lower
        upper = np.broadcast_to(upper, (k,)).copy() if upper.size == 1 else upper
        if lower.shape != (k,) or upper.shape != (k,):
            raise ValueError("Limites da caixa incompatíveis com a dimensão k.")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("Limites da caixa não podem ser NaN.")
        if np.any(lower > upper):
            raise ValueError("Limite inferior maior que o superior: caixa vazia.")
        if np.any(np.isposinf(lower)) or np.any(np.isneginf(upper)):
            raise ValueError("Caixa vazia: limites infinitos no sentido errado.")
        super().__init__(k)
        self._lower = lower
        self._upper = upper

    @property
    def lower(self) -> np.ndarray:
        return self._lower.copy()

    @property
    def upper(self) -> np.ndarray:
        return self._upper.copy()

    def _slack(self, bound):
        return np.where(np.isfinite(bound), DOMAIN_TOL * (1.0 + np.abs(bound)), 0.0)

    def in_domain_batch(self, U):
        U = self.as_batch(U)
        above = U >= self._lower - self._slack(self._lower)
        below = U <= self._upper + self._slack(self._upper)
        return np.all(above & below, axis=1)

    def _finite_values(self, U):
        return np.zeros(U.shape[0])

    def _prox_batch(self, lam, V):
        return np.clip(V, self._lower, self._upper)

    def _active(self, u):
        at_lower = u <= self._lower + self._slack(self._lower)
        at_upper = u >= self._upper - self._slack(self._upper)
        return at_lower, at_upper

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        z = np.asarray(z, dtype=float)
        at_lower, at_upper = self._active(u)
        out_plus = np.any(at_lower & (z < 0)) or np.any(at_upper & (z > 0))
        out_minus = np.any(at_lower & (z > 0)) or np.any(at_upper & (z < 0))
        return _leaves(side, out_plus, out_minus)

    def minimal_section(self, u):
        return np.zeros(self.k) if self.in_domain(u) else None

    def is_smooth_at(self, u):
        at_lower, at_upper = self._active(self.as_point(u))
        return not bool(np.any(at_lower | at_upper))

    def snap(self, u, tol):
        u = np.where(np.abs(u - self._lower) <= tol, self._lower, u)
        return np.where(np.abs(u - self._upper) <= tol, self._upper, u)

    def sample_domain(self, rng, n):
        U = np.empty((n, self.k))
        for i in range(self.k):
            lo, hi = self._lower[i], self._upper[i]
            if np.isfinite(lo) and np.isfinite(hi):
                col = rng.uniform(lo, hi, size=n)
            elif np.isfinite(lo):
                col = lo + rng.exponential(2.0, size=n)
            elif np.isfinite(hi):
                col = hi - rng.exponential(2.0, size=n)
            else:
                col = rng.normal(scale=2.0, size=n)
            pin = rng.random(size=n)
            if np.isfinite(lo):
                col[pin < 0.15] = lo
            if np.isfinite(hi):
                col[pin > 0.85] = hi
            U[:, i] = col
        return U

    def domain_point(self):
        lo = np.where(np.isfinite(self._lower), self._lower, np.nan)
        hi = np.where(np.isfinite(self._upper), self._upper, np.nan)
        mid = np.where(np.isnan(lo), np.where(np.isnan(hi), 0.0, hi), np.where(np.isnan(hi), lo, 0.5 * (lo + hi)))
        return mid

    def params(self):
        return {
            "lower": [encode_bound(a) for a in self._lower],
            "upper": [encode_bound(b) for b in self._upper],
        }


class IndicatorBall(ConvexFunction):
    """
    Indicatriz da bola fechada B(c, r), r ≥ 0.

    Bola fechada é convexa, fechada e não vazia; a indicatriz é própria
    e s.c.i.; prox é a projeção radial.
    """

    kind = "indicator_ball"

    def __init__(self, center, radius: float):
        center = np.asarray(center, dtype=float).reshape(-1)
        if not np.all(np.isfinite(center)):
            raise ValueError("Centro da bola deve ser finito.")
        if not np.isfinite(radius) or radius < 0:
            raise ValueError("Raio da bola deve ser finito e não negativo.")
        super().__init__(center.size)
        self._center = center
        self._radius = float(radius)

    def _limit(self):
        return self._radius * (1.0 + DOMAIN_TOL) + DOMAIN_TOL

    def in_domain_batch(self, U):
        U = self.as_batch(U)
        return np.linalg.norm(U - self._center, axis=1) <= self._limit()

    def _finite_values(self, U):
        return np.zeros(U.shape[0])

    def _prox_batch(self, lam, V):
        offset = V - self._center
        norms = np.linalg.norm(offset, axis=1, keepdims=True)
        outside = norms > self._radius
        scale = np.where(outside, self._radius / np.where(norms > 0, norms, 1.0), 1.0)
        return self._center + offset * scale

    def _on_boundary(self, u):
        return np.linalg.norm(u - self._center) >= self._radius * (1.0 - DOMAIN_TOL) - DOMAIN_TOL

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        z = np.asarray(z, dtype=float)
        if not self._on_boundary(u) or not np.any(z):
            return ExtendedReal(0.0)
        offset = u - self._center
        slope = offset @ z
        tangent = abs(slope) <= DOMAIN_TOL * (1.0 + np.linalg.norm(offset) * np.linalg.norm(z))
        # bola estritamente convexa: direções tangentes também saem do conjunto
        return _leaves(side, slope > 0 or tangent, slope < 0 or tangent)

    def minimal_section(self, u):
        return np.zeros(self.k) if self.in_domain(u) else None

    def is_smooth_at(self, u):
        return not self._on_boundary(self.as_point(u))

    def snap(self, u, tol):
        offset = u - self._center
        norm = np.linalg.norm(offset)
        if norm == 0.0 or abs(norm - self._radius) > tol:
            return u
        return self._center + offset * (self._radius / norm)

    def sample_domain(self, rng, n):
        directions = rng.normal(size=(n, self.k))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self._radius * rng.random(size=(n, 1)) ** (1.0 / self.k)
        radii[rng.random(size=n) < 0.25] = self._radius
        return self._center + directions * radii

    def domain_point(self):
        return self._center.copy()

    def params(self):
        return {"center": self._center.tolist(), "radius": self._radius}


class IndicatorHalfspace(ConvexFunction):
    """
    Indicatriz do semiespaço {u : ⟨n, u⟩ ≤ c}, n ≠ 0.

    Semiespaço fechado e não vazio: indicatriz convexa, própria e s.c.i.
    """

    kind = "indicator_halfspace"

    def __init__(self, normal, offset: float):
        normal = np.asarray(normal, dtype=float).reshape(-1)
        if not np.all(np.isfinite(normal)) or not np.any(normal):
            raise ValueError("Normal do semiespaço deve ser finita e não nula.")
        if not np.isfinite(offset):
            raise ValueError("Deslocamento do semiespaço deve ser finito.")
        super().__init__(normal.size)
        self._normal = normal
        self._offset = float(offset)
        self._norm2 = float(normal @ normal)

    def _slack(self, U):
        return DOMAIN_TOL * (1.0 + abs(self._offset) + np.sqrt(self._norm2) * np.linalg.norm(U, axis=-1))

    def in_domain_batch(self, U):
        U = self.as_batch(U)
        return U @ self._normal <= self._offset + self._slack(U)

    def _finite_values(self, U):
        return np.zeros(U.shape[0])

    def _prox_batch(self, lam, V):
        excess = np.maximum(V @ self._normal - self._offset, 0.0)
        return V - np.outer(excess / self._norm2, self._normal)

    def _on_boundary(self, u):
        return u @ self._normal >= self._offset - self._slack(u)

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        z = np.asarray(z, dtype=float)
        if not self._on_boundary(u):
            return ExtendedReal(0.0)
        slope = self._normal @ z
        tol = DOMAIN_TOL * np.sqrt(self._norm2) * np.linalg.norm(z)
        return _leaves(side, slope > tol, slope < -tol)

    def minimal_section(self, u):
        return np.zeros(self.k) if self.in_domain(u) else None

    def is_smooth_at(self, u):
        return not self._on_boundary(self.as_point(u))

    def snap(self, u, tol):
        gap = u @ self._normal - self._offset
        if abs(gap) > tol * np.sqrt(self._norm2):
            return u
        return u - (gap / self._norm2) * self._normal

    def sample_domain(self, rng, n):
        V =rng.normal(scale=2.0, size=(n, self.k))
        excess = V @ self._normal - self._offset
        depth = np.where(rng.random(size=n) < 0.25, 0.0, rng.exponential(2.0, size=n))
        return V - np.outer((excess + depth) / self._norm2, self._normal)

    def domain_point(self):
        return self._normal * (self._offset / self._norm2)

    def params(self):
        return {"normal": self._normal.tolist(), "offset": self._offset}
