# schemas/problem_schema.py
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from schemas.convex_schema import ConvexSchema, Matrix, Vector

CONSTANT_NAMES = ("L", "gamma", "M1", "p", "M2", "r")


class CoefficientSchema(BaseModel):
    """Coeficientes b e σ por tipo de registro e parâmetros."""

    model_config = ConfigDict(extra="forbid")

    drift_kind: Literal["zero", "constant", "affine"] = "zero"
    drift_matrix: Optional[Matrix] = None
    drift_vector: Optional[Vector] = None
    diffusion_kind: Literal["zero", "constant", "diagonal_affine"] = "zero"
    diffusion_matrix: Optional[Matrix] = None
    diffusion_base: Optional[Vector] = None
    diffusion_slope: Optional[Vector] = None

    @model_validator(mode="after")
    def validar_parametros(self):
        if self.drift_kind != "zero" and self.drift_vector is None:
            raise ValueError(f"drift_kind={self.drift_kind} exige drift_vector")
        if self.drift_kind == "affine" and self.drift_matrix is None:
            raise ValueError("drift_kind=affine exige drift_matrix")
        if self.diffusion_kind == "constant" and self.diffusion_matrix is None:
            raise ValueError("diffusion_kind=constant exige diffusion_matrix")
        if self.diffusion_kind == "diagonal_affine" and self.diffusion_base is None:
            raise ValueError("diffusion_kind=diagonal_affine exige diffusion_base")
        return self


class GeneratorSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["zero", "constant", "linear", "affine", "named"] = "zero"
    constant: Optional[Vector] = None
    gamma: Optional[float] = None
    x_matrix: Optional[Matrix] = None
    y_matrix: Optional[Matrix] = None
    name: Optional[str] = None

    @model_validator(mode="after")
    def validar_tipo(self):
        if self.kind == "linear" and self.gamma is None:
            raise ValueError("Gerador linear exige gamma")
        if self.kind == "constant" and self.constant is None:
            raise ValueError("Gerador constante exige constant")
        if self.kind == "named" and not self.name:
            raise ValueError("Gerador nomeado exige name")
        return self


class TerminalSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["polynomial", "positive_part", "norm", "named"]
    inputs: Optional[List[int]] = None
    coefficients: Optional[List[Vector]] = None
    strikes: Optional[Vector] = None
    name: Optional[str] = None

    @model_validator(mode="after")
    def validar_tipo(self):
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("Condição polinomial exige coefficients")
        if self.kind == "named" and not self.name:
            raise ValueError("Condição nomeada exige name")
        return self


class ProblemSchema(BaseModel):
    """Problema completo: dimensões, horizonte, b, σ, f, h, φ e constantes declaradas."""

    model_config = ConfigDict(extra="forbid")

    d: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    T: float = Field(..., gt=0)
    coeffs: CoefficientSchema = Field(default_factory=CoefficientSchema)
    gen: GeneratorSchema = Field(default_factory=GeneratorSchema)
    term: TerminalSchema
    phi: ConvexSchema
    constants: Dict[str, float] = Field(default_factory=dict)

    @field_validator("constants")
    @classmethod
    def validar_constantes(cls, v):
        unknown = sorted(set(v) - set(CONSTANT_NAMES))
        if unknown:
            raise ValueError(f"Constantes desconhecidas: {', '.join(unknown)}. Use: {', '.join(CONSTANT_NAMES)}")
        return v
