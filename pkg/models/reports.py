# models/reports.py
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from models.extended_real import ExtendedReal


@dataclass
class CheckResult:
    """Resultado genérico de uma verificação com métricas e detalhe legível."""

    name: str
    passed: bool
    metrics: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class MomentReport:
    p: float
    n_steps: int
    sup_moment: float
    stderr: float
    ratio: float
    growing: bool = False

    def to_dict(self):
        return asdict(self)


@dataclass
class FlatnessReport:
    n_checked: int
    violations: int
    violation_fraction: float
    domain_fraction: float
    mean_phi: ExtendedReal
    max_abs_u: float

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.domain_fraction == 1.0 and self.mean_phi.is_finite()

    def to_dict(self):
        data = asdict(self)
        data["mean_phi"] = self.mean_phi.to_json()
        data["passed"] = self.passed
        return data


@dataclass
class StabilityReport:
    n_steps: int
    sup_moment: float
    ratio: float
    energy: float
    growing: bool = False

    def to_dict(self):
        return asdict(self)


@dataclass
class MarkovReport:
    origin_t: float
    s: float
    n_used: int
    n_excluded: int
    mean_discrepancy: float
    regression_error: float
    field_error: float
    interpolation_error: float
    factor: float

    @property
    def combined_error(self) -> float:
        return self.regression_error + self.field_error + self.interpolation_error

    @property
    def ratio(self) -> float:
        if self.combined_error == 0.0:
            return 0.0 if self.mean_discrepancy == 0.0 else float("inf")
        return self.mean_discrepancy / self.combined_error

    @property
    def passed(self) -> bool:
        return self.mean_discrepancy <= self.factor * self.combined_error + 1e-12

    def to_dict(self):
        data = asdict(self)
        data.update(combined_error=self.combined_error, ratio=self.ratio, passed=self.passed)
        return data


@dataclass
class GrowthReport:
    p: float
    constant: float
    decades: float
    covers_two_decades: bool
    trending_up: bool
    exponent: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.trending_up

    def to_dict(self):
        data = asdict(self)
        data["passed"] = self.passed
        return data


@dataclass
class ViscosityRow:
    t: float
    x: List[float]
    z: List[float]
    res_super: Optional[ExtendedReal]
    res_sub: Optional[ExtendedReal]
    fit_residual: float
    tau: float
    flag: str
    reason: str = ""


@dataclass
class ViscosityReport:
    rows: List[ViscosityRow] = field(default_factory=list)
    truncation_estimate: float = 0.0

    @property
    def violations(self) -> List[ViscosityRow]:
        return [row for row in self.rows if row.flag == "violation"]

    @property
    def abstentions(self) -> List[ViscosityRow]:
        return [row for row in self.rows if row.flag == "abstain"]

    def flagged_nodes(self) -> List[tuple]:
        nodes = []
        for row in self.violations:
            node = (row.t, tuple(row.x))
            if node not in nodes:
                nodes.append(node)
        return nodes

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> Dict[str, Any]:
        return {
            "rows": len(self.rows),
            "violations": len(self.violations),
            "abstentions": len(self.abstentions),
            "flagged_nodes": [[t, list(x)] for t, x in self.flagged_nodes()],
            "truncation_estimate": self.truncation_estimate,
            "passed": self.passed,
        }


@dataclass
class ConvexSuiteReport:
    kind: str
    n_samples: int
    seed: int
    violations: List[Dict[str, Any]] = field(default_factory=list)
    criteria_agreement: float = 1.0
    laws_checked: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations and self.criteria_agreement >= 0.99

    def to_dict(self):
        data = asdict(self)
        data["passed"] = self.passed
        return data


@dataclass
class RefinementStudy:
    """Sequência de relatórios sob refinamento da malha temporal."""

    reports: List[Any]
    growing: bool
    factor: float
    note: Optional[str] = None

    def to_dict(self):
        return {
            "reports": [r.to_dict() for r in self.reports],
            "growing": self.growing,
            "factor": self.factor,
            "note": self.note,
        }
