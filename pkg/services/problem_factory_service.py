import logging
from typing import Optional

from config.settings import Settings
from models.coefficient_field import CoefficientField
from models.convex_function import ConvexFunction
from models.exceptions import ConfigError
from models.generator import Generator
from models.indicator_functions import IndicatorBall, IndicatorBox, IndicatorHalfspace
from models.jet import Stencil
from models.norm_functions import EuclideanNorm, Quadratic, SeparableAbs, Zero
from models.piecewise_functions import MaxOfAffine, ScaledSum
from models.problem_spec import ProblemSpec
from models.run_settings import LatticeSettings, MonteCarloSettings
from models.terminal_map import TerminalMap
from schemas.problem_schema import ProblemSchema
from schemas.run_config_schema import LatticeSchema, MonteCarloSchema, ViscosityCheckSchema

logger = logging.getLogger(__name__)


class ProblemFactoryService:
    """Converte as configurações validadas em objetos do domínio (tag do registro + parâmetros)."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    def build_phi(self, schema, k: Optional[int] = None) -> ConvexFunction:
        """
        Raises:
            ConfigError: Se os parâmetros não definem uma função válida do tipo.
        """
        k = schema.k or k
        try:
            phi = self._build_phi(schema, k)
        except ValueError as e:
            raise ConfigError(f"φ ({schema.kind}) inválida: {e}") from e
        if k is not None and phi.k != k:
            raise ConfigError(f"φ ({schema.kind}) tem k={phi.k}, esperado k={k}.")
        return phi

    def _build_phi(self, schema, k) -> ConvexFunction:
        s = self.settings
        kind = schema.kind
        if kind in ("zero", "separable_abs", "euclidean_norm"):
            if k is None:
                raise ConfigError(f"φ ({kind}) exige a dimensão k.")
            return {"zero": Zero, "separable_abs": SeparableAbs, "euclidean_norm": EuclideanNorm}[kind](k)
        if kind == "quadratic":
            return Quadratic(schema.matrix)
        if kind == "indicator_box":
            return IndicatorBox(schema.lower, schema.upper, k)
        if kind == "indicator_ball":
            return IndicatorBall(schema.center, schema.radius)
        if kind == "indicator_halfspace":
            return IndicatorHalfspace(schema.normal, schema.offset)
        if kind == "max_of_affine":
            return MaxOfAffine(schema.slopes, schema.intercepts, s.prox_tol, s.prox_max_iter)
        terms = [(term.weight, self.build_phi(term.function, k)) for term in schema.terms]
        return ScaledSum(terms, s.prox_tol, s.prox_max_iter)

    def build_problem(self, schema: ProblemSchema) -> ProblemSpec:
        """
        Monta o ProblemSpec e valida as constantes declaradas.

        Raises:
            ConfigError: Se algum componente é inválido ou incompatível.
        """
        d, k = schema.d, schema.k
        c, g, h = schema.coeffs, schema.gen, schema.term
        try:
            coeffs = CoefficientField(
                d, c.drift_kind, c.drift_matrix, c.drift_vector,
                c.diffusion_kind, c.diffusion_matrix, c.diffusion_base, c.diffusion_slope,
            )
            gen = Generator(g.kind, d, k, g.constant, g.gamma, g.x_matrix, g.y_matrix, g.name)
            term = TerminalMap(h.kind, d, h.inputs, h.coefficients, h.strikes, h.name)
        except ValueError as e:
            raise ConfigError(f"Problema inválido: {e}") from e
        phi = self.build_phi(schema.phi, k)
        spec = ProblemSpec(d, k, schema.T, coeffs, gen, term, phi, schema.constants)
        logger.debug("Problema montado: %r", spec)
        return spec

    @staticmethod
    def build_mc(schema: MonteCarloSchema) -> MonteCarloSettings:
        return MonteCarloSettings(
            n_paths=schema.n_paths,
            n_steps=schema.n_steps,
            seed=schema.seed,
            variance_reduction=schema.variance_reduction,
            implicit=schema.implicit,
            degree=schema.degree,
        )

    @staticmethod
    def build_lattice(schema: Optional[LatticeSchema]) -> Optional[LatticeSettings]:
        if schema is None:
            return None
        return LatticeSettings(tuple(schema.x_range), schema.n_space, schema.n_steps)

    @staticmethod
    def build_stencil(schema: ViscosityCheckSchema) -> Stencil:
        return Stencil(schema.n_space, schema.n_time, schema.radius)
