# models/piecewise_functions.py
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from models.convex_function import ConvexFunction
from models.exceptions import ProxConvergenceError
from models.extended_real import ExtendedReal
from models.norm_functions import check_side

ACTIVE_TOL = 1e-10

# Raio relativo de encaixe nas quinas e folga do certificado KKT da soma escalada.
SNAP_TOL = 1e-6
CERTIFICATE_TOL = 1e-8


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Projeção euclidiana no simplex {θ ≥ 0, Σθ = 1}."""
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, x.size + 1)
    rho = ind[u - css / ind > 0][-1]
    return np.maximum(x - css[rho - 1] / rho, 0.0)


class MaxOfAffine(ConvexFunction):
    """
    φ(u) = maxⱼ(⟨aⱼ, u⟩ + cⱼ).

    Máximo pontual de funções afins: convexa, finita e contínua (poliédrica).
    O prox não tem forma fechada e é resolvido pelo dual no simplex
    (gradiente projetado acelerado) com polimento exato do conjunto ativo.
    """

    kind = "max_of_affine"

    def __init__(self, slopes, intercepts, prox_tol: float = 1e-10, prox_max_iter: int = 10000):
        A = np.atleast_2d(np.asarray(slopes, dtype=float))
        c = np.asarray(intercepts, dtype=float).reshape(-1)
        if A.shape[0] != c.size or c.size == 0:
            raise ValueError("Número de inclinações e de interceptos deve coincidir e ser positivo.")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
            raise ValueError("Parâmetros afins devem ser finitos.")
        super().__init__(A.shape[1])
        self._A = A
        self._c = c
        self._prox_tol = prox_tol
        self._prox_max_iter = prox_max_iter

    def _finite_values(self, U):
        return np.max(U @ self._A.T + self._c, axis=1)

    def active_set(self, u) -> np.ndarray:
        pieces = self._A @ u + self._c
        top = pieces.max()
        return np.flatnonzero(pieces >= top - ACTIVE_TOL * (1.0 + abs(top)))

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        slopes = self._A[self.active_set(u)] @ np.asarray(z, dtype=float)
        return ExtendedReal(slopes.max() if side == "plus" else slopes.min())

    def minimal_section(self, u):
        u = self.as_point(u)
        active = self._A[self.active_set(u)]
        if active.shape[0] == 1:
            return active[0].copy()
        m = active.shape[0]
        gram = active @ active.T
        result = minimize(
            lambda th: th @ gram @ th,
            np.full(m, 1.0 / m),
            jac=lambda th: 2.0 * gram @ th,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * m,
            constraints=[{"type": "eq", "fun": lambda th: th.sum() - 1.0, "jac": lambda th: np.ones(m)}],
            options={"ftol": 1e-15, "maxiter": 500},
        )
        theta = np.clip(result.x, 0.0, None)
        theta /= theta.sum()
        return active.T @ theta

    def is_smooth_at(self, u):
        return self.active_set(self.as_point(u)).size == 1

    def _prox_batch(self, lam, V):
        return np.vstack([self._prox_single(lam, v) for v in V])

    def _polish(self, lam, v, u) -> Optional[np.ndarray]:
        """Resolve exatamente o sistema KKT no conjunto ativo estimado."""
        pieces = self._A @ u + self._c
        top = pieces.max()
        active = list(np.flatnonzero(pieces >= top - 1e-6 * (1.0 + abs(top))))
        while active:
            AJ = self._A[active]
            m = len(active)
            system = np.zeros((m + 1, m + 1))
            system[:m, :m] = lam * AJ @ AJ.T
            system[:m, m] = 1.0
            system[m, :m] = 1.0
            rhs = np.append(AJ @ v + self._c[active], 1.0)
            solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
            theta, level = solution[:m], solution[m]
            if theta.min() < -1e-12:
                active.pop(int(np.argmin(theta)))
                continue
            candidate = v - lam * AJ.T @ theta
            pieces = self._A @ candidate + self._c
            if np.all(pieces <= level + 1e-12 * (1.0 + abs(level))) and np.allclose(
                system @ solution, rhs, atol=1e-12 * (1.0 + np.abs(rhs).max())
            ):
                return candidate
            return None
        return None

    def _prox_single(self, lam, v):
        A, c = self._A, self._c
        lipschitz = lam * np.linalg.norm(A, 2) ** 2
        if lipschitz == 0.0:
            return v.copy()
        b = A @ v + c
        theta = np.zeros(c.size)
        theta[np.argmax(b)] = 1.0
        y, t = theta.copy(), 1.0
        for iteration in range(self._prox_max_iter):
            u = v - lam * A.T @ theta
            if iteration % 5 == 0:
                polished = self._polish(lam, v, u)
                if polished is not None:
                    return polished
            primal = np.max(A @ u + c) + (u - v) @ (u - v) / (2.0 * lam)
            dual = theta @ b - 0.5 * lam * np.sum((A.T @ theta) ** 2)
            if primal - dual <= self._prox_tol * (1.0 + abs(primal)):
                return u
            gradient = b - lam * A @ (A.T @ y)
            theta_next = project_simplex(y + gradient / lipschitz)
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = theta_next + ((t - 1.0) / t_next) * (theta_next - theta)
            theta, t = theta_next, t_next
        raise ProxConvergenceError(
            f"Prox de max_of_affine não convergiu em {self._prox_max_iter} iterações."
        )

    def params(self):
        return {"slopes": self._A.tolist(), "intercepts": self._c.tolist()}


class ScaledSum(ConvexFunction):
    """
    φ = Σᵢ wᵢ φᵢ com pesos wᵢ > 0.

    Combinação cônica de funções convexas próprias s.c.i. é convexa e s.c.i.;
    é própria desde que os domínios se intersectem, o que é verificado na
    construção. Assume-se Dom(∂φ) = Dom(φ) (qualificação válida para os
    tipos do registro quando a interseção tem interior relativo comum).
    """

    kind = "scaled_sum"

    def __init__(
        self,
        terms: Sequence[Tuple[float, ConvexFunction]],
        prox_tol: float = 1e-10,
        prox_max_iter: int = 10000,
    ):
        if not terms:
            raise ValueError("Soma escalada precisa de ao menos um termo.")
        dims = {term.k for _, term in terms}
        if len(dims) != 1:
            raise ValueError("Todos os termos devem ter a mesma dimensão k.")
        weights = [float(w) for w, _ in terms]
        if any(not np.isfinite(w) or w <= 0 for w in weights):
            raise ValueError("Pesos da soma escalada devem ser positivos e finitos.")
        super().__init__(dims.pop())
        self._terms: List[Tuple[float, ConvexFunction]] = [(w, f) for w, (_, f) in zip(weights, terms)]
        self._prox_tol = prox_tol
        self._prox_max_iter = prox_max_iter
        if not self.in_domain(self.domain_point()):
            raise ValueError("Domínios dos termos não se intersectam: soma imprópria.")

    @property
    def terms(self) -> List[Tuple[float, ConvexFunction]]:
        return list(self._terms)

    def in_domain_batch(self, U):
        U = self.as_batch(U)
        inside = np.ones(U.shape[0], dtype=bool)
        for _, term in self._terms:
            inside &= term.in_domain_batch(U)
        return inside

    def _finite_values(self, U):
        return sum(w * term._finite_values(U) for w, term in self._terms)

    def dir_deriv(self, u, z, side):
        check_side(side)
        total = ExtendedReal(0.0)
        for w, term in self._terms:
            total = total + w * term.dir_deriv(u, z, side)
        return total

    def is_smooth_at(self, u):
        return all(term.is_smooth_at(u) for _, term in self._terms)

    def _prox_batch(self, lam, V):
        if len(self._terms) == 1:
            w, term = self._terms[0]
            return term.prox(lam * w, V)
        # algoritmo paralelo tipo Dykstra
        m = len(self._terms)
        x = V.copy()
        Z = [V.copy() for _ in range(m)]
        scale = lam * (1.0 + np.linalg.norm(V, axis=1))
        for _ in range(self._prox_max_iter):
            P = [term.prox(m * lam * w, Z[i]) for i, (w, term) in enumerate(self._terms)]
            x_next = sum(P) / m
            for i in range(m):
                Z[i] = x_next + Z[i] - P[i]
            step = np.linalg.norm(x_next - x, axis=1)
            x = x_next
            floor = 4.0 * np.finfo(float).eps * (1.0 + np.linalg.norm(x, axis=1))
            if np.all(step <= np.maximum(self._prox_tol * scale, floor)):
                return np.vstack([self._polish(lam, v, p) for v, p in zip(V, x)])
        raise ProxConvergenceError(
            f"Prox de scaled_sum não convergiu em {self._prox_max_iter} iterações."
        )

    def snap(self, u, tol):
        for _, term in self._terms:
            u = term.snap(u, tol)
        return u

    def _polish(self, lam, v, p) -> np.ndarray:
        """
        Leva o ponto do laço às quinas próximas dos termos.

        O ponto encaixado só é aceito se (v − p)/λ ∈ ∂φ(p) valer nas
        direções de teste; caso contrário devolve o ponto original.
        """
        candidate = self.snap(p, SNAP_TOL * (1.0 + np.linalg.norm(p)))
        if np.array_equal(candidate, p) or not self.in_domain(candidate):
            return p
        residual = (v - candidate) / lam
        slack = CERTIFICATE_TOL * (1.0 + np.linalg.norm(residual))
        axes = np.eye(self.k)
        directions = [*axes, *(-axes)]
        for extra in (residual, p - candidate):
            norm = np.linalg.norm(extra)
            if norm > 0:
                directions += [extra / norm, -extra / norm]
        for z in directions:
            if residual @ z > float(self.dir_deriv(candidate, z, "plus")) + slack:
                return p
        return candidate

    def sample_domain(self, rng, n):
        pool = np.vstack([term.sample_domain(rng, n) for _, term in self._terms])
        pool = pool[rng.permutation(pool.shape[0])]
        projected = self.prox(1e-12, pool)
        inside = projected[self.in_domain_batch(projected)]
        if inside.shape[0] < n:
            inside = np.vstack([inside, np.tile(self.domain_point(), (n - inside.shape[0], 1))])
        return inside[:n]

    def domain_point(self):
        start = self._terms[0][1].domain_point()
        if len(self._terms) == 1:
            return start
        return self.prox(1e-12, start)

    def params(self):
        return {"terms": [{"weight": w, "function": term.to_dict()} for w, term in self._terms]}
