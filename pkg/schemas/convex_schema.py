# schemas/convex_schema.py
import math
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator


def parse_bound(value):
    """Aceita números e as strings "inf" / "-inf" para limites infinitos."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return math.inf
        if text in ("-inf", "-infinity"):
            return -math.inf
        raise ValueError(f"Limite inválido: {value!r}. Use um número, \"inf\" ou \"-inf\".")
    return value


Bound = Annotated[float, BeforeValidator(parse_bound)]
Vector = List[float]
Matrix = List[List[float]]


class ConvexBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: Optional[int] = Field(None, ge=1, description="Dimensão do espaço de saída")


class ZeroSchema(ConvexBase):
    kind: Literal["zero"]


class SeparableAbsSchema(ConvexBase):
    kind: Literal["separable_abs"]


class EuclideanNormSchema(ConvexBase):
    kind: Literal["euclidean_norm"]


class QuadraticSchema(ConvexBase):
    kind: Literal["quadratic"]
    matrix: Matrix = Field(..., description="Matriz simétrica semidefinida positiva Q")

    @field_validator("matrix")
    @classmethod
    def validar_matriz(cls, v):
        if not v or any(len(row) != len(v) for row in v):
            raise ValueError("Matriz Q deve ser quadrada e não vazia")
        return v


class IndicatorBoxSchema(ConvexBase):
    kind: Literal["indicator_box"]
    lower: Union[Bound, List[Bound]]
    upper: Union[Bound, List[Bound]]


class IndicatorBallSchema(ConvexBase):
    kind: Literal["indicator_ball"]
    center: Vector
    radius: float = Field(..., ge=0)


class IndicatorHalfspaceSchema(ConvexBase):
    kind: Literal["indicator_halfspace"]
    normal: Vector
    offset: float


class MaxOfAffineSchema(ConvexBase):
    kind: Literal["max_of_affine"]
    slopes: Matrix
    intercepts: Vector

    @field_validator("intercepts")
    @classmethod
    def validar_interceptos(cls, v, info):
        slopes = info.data.get("slopes")
        if slopes is not None and len(slopes) != len(v):
            raise ValueError("Número de interceptos deve ser igual ao número de inclinações")
        return v


class WeightedTermSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weight: float = Field(..., gt=0)
    function: "ConvexSchema"


class ScaledSumSchema(ConvexBase):
    kind: Literal["scaled_sum"]
    terms: List[WeightedTermSchema] = Field(..., min_length=1)


ConvexSchema = Annotated[
    Union[
        ZeroSchema,
        SeparableAbsSchema,
        EuclideanNormSchema,
        QuadraticSchema,
        IndicatorBoxSchema,
        IndicatorBallSchema,
        IndicatorHalfspaceSchema,
        MaxOfAffineSchema,
        ScaledSumSchema,
    ],
    Field(discriminator="kind"),
]

WeightedTermSchema.model_rebuild()
