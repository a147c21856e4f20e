# schemas/run_config_schema.py
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.problem_schema import ProblemSchema


class GridSchema(BaseModel):
    """Malha explícita: listas de instantes e de pontos (sem malhamento implícito)."""

    model_config = ConfigDict(extra="forbid")

    times: List[float] = Field(..., min_length=1)
    points: List[List[float]] = Field(..., min_length=1)


class MonteCarloSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_paths: int = Field(..., ge=1, description="Número de trajetórias por nó")
    n_steps: int = Field(..., ge=1, description="Passos em [0, T]")
    seed: int = Field(..., ge=0, description="Semente mestre (obrigatória)")
    variance_reduction: Literal["none", "terminal_matching"] = "terminal_matching"
    implicit: bool = False
    degree: Optional[int] = Field(None, ge=0)


class LatticeSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_range: Tuple[float, float]
    n_space: int = Field(..., ge=3)
    n_steps: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validar_intervalo(self):
        if not self.x_range[0] < self.x_range[1]:
            raise ValueError(f"x_range inválido: {list(self.x_range)}")
        return self


class OutputSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: str = "out"
    field_csv: str = "field.csv"
    viscosity_csv: str = "viscosity.csv"
    manifest: str = "manifest.json"
    ensemble_csv: Optional[str] = None


class MarkovCheckSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    origin_t: float = 0.0
    origin_x: List[float]
    s: float
    n_paths: Optional[int] = Field(None, ge=1)


class GrowthCheckSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    p: Optional[float] = Field(None, ge=0, description="Expoente; por padrão o p do crescimento de h")


class ViscosityCheckSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    n_space: int = Field(1, ge=1)
    n_time: int = Field(1, ge=1)
    radius: float = Field(2.0, gt=0)
    seed: int = Field(0, ge=0)
    grid: Optional[GridSchema] = Field(None, description="Malha própria da varredura, avaliada no reticulado")
    min_value: Optional[float] = Field(None, ge=0, description="Varre só nós com |u| acima deste valor")


class ConvexCheckSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_samples: Optional[int] = Field(None, ge=1)
    tol: Optional[float] = Field(None, gt=0)


class ChecksSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    terminal_identity: bool = True
    domain: bool = True
    continuity: bool = True
    flatness: bool = True
    markov: Optional[MarkovCheckSchema] = None
    growth: GrowthCheckSchema = Field(default_factory=GrowthCheckSchema)
    viscosity: ViscosityCheckSchema = Field(default_factory=ViscosityCheckSchema)
    convex: ConvexCheckSchema = Field(default_factory=ConvexCheckSchema)


class ReferenceSchema(BaseModel):
    """Referência da tabela de aceitação dos demos."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["heat", "linear_generator", "lattice"]
    rel_tol: float = Field(0.02, gt=0)
    factor: float = Field(3.0, gt=0)


class RunConfigSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemSchema
    grid: GridSchema
    mc: MonteCarloSchema
    backend: Literal["regression", "lattice"] = "regression"
    lattice: Optional[LatticeSchema] = None
    output: OutputSchema = Field(default_factory=OutputSchema)
    checks: ChecksSchema = Field(default_factory=ChecksSchema)
    reference: Optional[ReferenceSchema] = None
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def validar_malha(self):
        T = self.problem.T
        for i, t in enumerate(self.grid.times):
            if t < 0.0 or t > T:
                raise ValueError(f"grid.times[{i}] = {t} fora de [0, T={T}]")
        for i, x in enumerate(self.grid.points):
            if len(x) != self.problem.d:
                raise ValueError(f"grid.points[{i}] = {x} deve ter d={self.problem.d} coordenadas")
        if self.backend == "lattice" or (self.reference and self.reference.kind == "lattice"):
            if self.lattice is None:
                raise ValueError("Backend ou referência de reticulado exige a seção lattice")
            if self.problem.d != 1:
                raise ValueError("Reticulado disponível apenas para d = 1")
        markov = self.checks.markov
        if markov is not None and markov.enabled:
            if not markov.origin_t < markov.s < T:
                raise ValueError(f"checks.markov.s = {markov.s} deve estar em ({markov.origin_t}, {T})")
            if len(markov.origin_x) != self.problem.d:
                raise ValueError(f"checks.markov.origin_x deve ter d={self.problem.d} coordenadas")
        viscosity = self.checks.viscosity
        if viscosity.enabled and viscosity.grid is not None:
            if self.lattice is None or self.problem.d != 1:
                raise ValueError("checks.viscosity.grid exige d = 1 e a seção lattice")
            if any(t < 0.0 or t > T for t in viscosity.grid.times):
                raise ValueError(f"checks.viscosity.grid.times fora de [0, T={T}]")
            if any(len(x) != 1 for x in viscosity.grid.points):
                raise ValueError("checks.viscosity.grid.points deve ter d=1 coordenada")
        return self
