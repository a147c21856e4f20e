import logging
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import Settings
from models.convex_function import ConvexFunction
from models.exceptions import ConfigError
from models.problem_spec import ProblemSpec
from models.solution_field import SolutionField
from models.time_grid import TimeGrid
from repositories.config_repository import ConfigRepository
from repositories.ensemble_repository import EnsembleRepository
from repositories.field_repository import FieldRepository
from repositories.run_repository import RunRepository
from repositories.viscosity_report_repository import ViscosityReportRepository
from schemas.run_config_schema import RunConfigSchema
from services.bsvi_solver_service import BsviSolverService
from services.convex_verification_service import ConvexVerificationService
from services.forward_sde_service import ForwardSdeService
from services.problem_factory_service import ProblemFactoryService
from services.solution_field_service import SolutionFieldService
from services.viscosity_checker_service import ViscosityCheckerService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CONVEX = 4
EXIT_FIELD = 5

OVERRIDE_PATHS = {
    "seed": ("mc", "seed"),
    "paths": ("mc", "n_paths"),
    "steps": ("mc", "n_steps"),
    "backend": ("backend",),
    "workers": ("workers",),
    "out": ("output", "dir"),
}


@dataclass
class RunOutcome:
    """Resultado de um comando: código de saída, verificações e arquivos emitidos."""

    command: str
    exit_code: int
    checks: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    table: List[Dict[str, Any]] = field(default_factory=list)
    manifest_path: Optional[str] = None

    @property
    def failed_checks(self) -> List[str]:
        return [name for name, result in self.checks.items() if not result.get("passed", False)]


class RunService:
    """
    Orquestra os comandos: carrega e valida a configuração, confere a
    saída antes de qualquer cálculo, executa os serviços, grava CSVs,
    manifesto e registro de execuções.
    """

    def __init__(self, settings: Optional[Settings] = None, configs: Optional[ConfigRepository] = None):
        self.settings = settings or Settings()
        self.configs = configs or ConfigRepository()
        self.factory = ProblemFactoryService(self.settings)
        self.forward = ForwardSdeService(self.settings)
        self.solver = BsviSolverService(settings=self.settings)
        self.fields = SolutionFieldService(self.forward, self.solver, settings=self.settings)
        self.viscosity = ViscosityCheckerService(self.solver.kernel, self.settings)
        self.convex = ConvexVerificationService(self.solver.kernel, self.settings)
        self.field_repository = FieldRepository()

    # ------------------------------------------------------------------
    # Configuração
    # ------------------------------------------------------------------

    def load(self, config_path, overrides: Optional[Dict[str, Any]] = None) -> RunConfigSchema:
        """
        Lê o JSON, aplica os overrides da linha de comando e valida.

        Raises:
            ConfigError: Arquivo ausente ou ilegível.
            pydantic.ValidationError: Configuração inválida.
        """
        data = self.configs.read_json(config_path)
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            target = data
            *parents, leaf = OVERRIDE_PATHS[key]
            for name in parents:
                target = target.setdefault(name, {})
            target[leaf] = value
        return RunConfigSchema.model_validate(data)

    def output_dir(self, config: RunConfigSchema, create: bool = False) -> Path:
        """
        Raises:
            ConfigError: Se o diretório de saída não existe ou não aceita escrita.
        """
        out = Path(config.output.dir)
        if create:
            out.mkdir(parents=True, exist_ok=True)
        if not out.is_dir():
            raise ConfigError(f"Diretório de saída inexistente: {out}")
        if not os.access(out, os.W_OK):
            raise ConfigError(f"Diretório de saída sem permissão de escrita: {out}")
        return out

    def _manifest(self, command: str, config_path, config: RunConfigSchema, overrides, started: float,
                  outcome: RunOutcome) -> Dict[str, Any]:
        return {
            "command": command,
            "config_path": str(config_path),
            "config": config.model_dump(mode="json"),
            "overrides": {k: v for k, v in (overrides or {}).items() if v is not None},
            "seed": config.mc.seed,
            "settings": self.settings.to_dict(),
            "wall_time": time.perf_counter() - started,
            "validation": outcome.checks,
            "outputs": outcome.outputs,
            "exit_code": outcome.exit_code,
        }

    def _finish(self, command: str, config_path, config: RunConfigSchema, overrides, started: float,
                outcome: RunOutcome, out: Path) -> RunOutcome:
        manifest_path = out / config.output.manifest
        if command != "solve":
            manifest_path = out / f"{Path(config.output.manifest).stem}-{command}.json"
        RunRepository.write_manifest(self._manifest(command, config_path, config, overrides, started, outcome),
                                     manifest_path)
        outcome.manifest_path = str(manifest_path)
        registry = RunRepository(out / "runs.db")
        run_id = registry.create(command, str(config_path), config.mc.seed, time.perf_counter() - started,
                                 "ok" if outcome.exit_code == EXIT_OK else "failed", outcome.exit_code,
                                 str(manifest_path))
        for name, result in outcome.checks.items():
            registry.add_check(run_id, name, bool(result.get("passed", False)), str(result.get("detail", "")))
        return outcome

    # ------------------------------------------------------------------
    # Comandos
    # ------------------------------------------------------------------

    def evaluate(self, spec: ProblemSpec, config: RunConfigSchema, backend: Optional[str] = None) -> SolutionField:
        return self.fields.evaluate_u(
            spec, config.grid.times, config.grid.points, self.factory.build_mc(config.mc),
            backend or config.backend, config.workers, self.factory.build_lattice(config.lattice),
        )

    def solve(self, config_path, overrides: Optional[Dict[str, Any]] = None, create_output: bool = False) -> RunOutcome:
        """Avalia u na malha e grava o CSV do campo e o manifesto."""
        started = time.perf_counter()
        config = self.load(config_path, overrides)
        out = self.output_dir(config, create_output)
        spec = self.factory.build_problem(config.problem)

        field_ = self.evaluate(spec, config)
        field_path = self.field_repository.export_csv(field_, out / config.output.field_csv)
        outcome = RunOutcome("solve", EXIT_OK, outputs={"field_csv": str(field_path)})
        outcome.checks["terminal_identity"] = self.fields.terminal_identity_check(spec, field_).to_dict()
        outcome.checks["domain"] = self.fields.domain_check(spec, field_).to_dict()

        if config.output.ensemble_csv:
            t0, x0 = float(np.min(config.grid.times)), np.asarray(config.grid.points[0], dtype=float)
            if t0 < spec.T:
                mc = self.factory.build_mc(config.mc)
                grid = TimeGrid(t0, spec.T, mc.steps_for(t0, spec.T))
                ensemble = self.forward.simulate(spec.coeffs, (t0, x0), grid, mc.n_paths, mc.seed,
                                                 config.workers, mc.variance_reduction)
                path = EnsembleRepository().dump_csv(ensemble, out / config.output.ensemble_csv)
                outcome.outputs["ensemble_csv"] = str(path)

        logger.info("solve concluído: %s", field_path)
        return self._finish("solve", config_path, config, overrides, started, outcome, out)

    def verify_convex(self, config_path, overrides: Optional[Dict[str, Any]] = None,
                      phi_override: Optional[ConvexFunction] = None, create_output: bool = False) -> RunOutcome:
        """Roda a bateria de leis convexas sobre a φ da configuração (ou a φ injetada)."""
        started = time.perf_counter()
        config = self.load(config_path, overrides)
        out = self.output_dir(config, create_output)
        phi = phi_override or self.factory.build_phi(config.problem.phi, config.problem.k)
        checks = config.checks.convex
        report = self.convex.verify_laws(phi, checks.n_samples, config.mc.seed, checks.tol)
        outcome = RunOutcome("verify-convex", EXIT_OK if report.passed else EXIT_CONVEX)
        outcome.checks["convex_laws"] = report.to_dict()
        return self._finish("verify-convex", config_path, config, overrides, started, outcome, out)

    def run_field_checks(self, spec: ProblemSpec, config: RunConfigSchema, field_: SolutionField,
                         out: Path) -> RunOutcome:
        """Verificações de consistência do campo; falhas resultam em código 5."""
        if field_.d != spec.d or field_.k != spec.k:
            raise ConfigError(f"Campo com (d, k) = ({field_.d}, {field_.k}) incompatível com o problema ({spec.d}, {spec.k}).")
        checks = config.checks
        outcome = RunOutcome("verify-field", EXIT_OK)
        mc = self.factory.build_mc(config.mc)

        if checks.terminal_identity:
            outcome.checks["terminal_identity"] = self.fields.terminal_identity_check(spec, field_).to_dict()
        if checks.domain:
            outcome.checks["domain"] = self.fields.domain_check(spec, field_).to_dict()
        if checks.continuity:
            outcome.checks["continuity_proxy"] = self.fields.continuity_proxy(field_).to_dict()
        if checks.growth.enabled:
            p = checks.growth.p if checks.growth.p is not None else spec.constants["p"]
            outcome.checks["growth"] = self.fields.growth_check(field_, p).to_dict()
        if checks.markov is not None and checks.markov.enabled:
            m = checks.markov
            markov_mc = mc if m.n_paths is None else replace(mc, n_paths=m.n_paths)
            report = self.fields.markov_consistency_check(spec, field_, (m.origin_t, m.origin_x), m.s,
                                                          markov_mc, config.workers)
            outcome.checks["markov"] = report.to_dict()
        if checks.flatness:
            outcome.checks["flatness"] = self._flatness(spec, config, field_)
        if checks.viscosity.enabled:
            v = checks.viscosity
            swept = field_
            if v.grid is not None:
                swept = self.fields.evaluate_u(spec, v.grid.times, v.grid.points, mc, backend="lattice",
                                               lattice=self.factory.build_lattice(config.lattice))
            nodes = self.viscosity.interior_nodes(spec, swept, v.min_value)
            report = self.viscosity.sweep(spec, swept, nodes, stencil=self.factory.build_stencil(v),
                                          seed=v.seed, workers=config.workers)
            path = ViscosityReportRepository().export_csv(report, out / config.output.viscosity_csv, spec.d, spec.k)
            outcome.outputs["viscosity_csv"] = str(path)
            summary = report.summary()
            summary["backend"] = swept.provenance.get("backend")
            if report.violations:
                flagged = "; ".join(f"(t={t}, x={list(x)})" for t, x in report.flagged_nodes())
                summary["detail"] = f"violações nos nós {flagged}"
            outcome.checks["viscosity"] = summary

        if outcome.failed_checks:
            outcome.exit_code = EXIT_FIELD
        return outcome

    def _flatness(self, spec: ProblemSpec, config: RunConfigSchema, field_: SolutionField) -> Dict[str, Any]:
        """(Y_i, U_i) ∈ ∂φ numa solução a partir do primeiro nó com t < T."""
        mc = self.factory.build_mc(config.mc)
        times = [t for t in field_.times if t < spec.T]
        if not times:
            return {"passed": True, "detail": "nenhum nó com t < T"}
        t0, x0 = float(times[0]), field_.points[0]
        grid = TimeGrid(t0, spec.T, mc.steps_for(t0, spec.T))
        ensemble = self.forward.simulate(spec.coeffs, (t0, x0), grid, mc.n_paths, mc.seed, config.workers,
                                         mc.variance_reduction)
        triple = self.solver.solve(ensemble, spec.gen, spec.term, spec.phi, self.fields.basis_for(mc),
                                   implicit=mc.implicit, workers=config.workers)
        return self.solver.flatness_check(triple, spec.phi, seed=mc.seed).to_dict()

    def verify_field(self, config_path, field_csv, overrides: Optional[Dict[str, Any]] = None,
                     create_output: bool = False) -> RunOutcome:
        started = time.perf_counter()
        config = self.load(config_path, overrides)
        out = self.output_dir(config, create_output)
        spec = self.factory.build_problem(config.problem)
        field_ = self.field_repository.import_csv(field_csv)
        outcome = self.run_field_checks(spec, config, field_, out)
        return self._finish("verify-field", config_path, config, overrides, started, outcome, out)

    # ------------------------------------------------------------------
    # Demos
    # ------------------------------------------------------------------

    def reference_values(self, spec: ProblemSpec, config: RunConfigSchema, field_: SolutionField):
        """Valores de referência do demo e a tolerância por nó."""
        reference = config.reference
        T = spec.T
        times = field_.times[:, None]
        if reference.kind == "heat":
            sq = np.sum(field_.points ** 2, axis=1)[None, :]
            trace = np.array([[np.trace(spec.coeffs.covariance(t, x)) for x in field_.points] for t in field_.times])
            return (sq + trace * (T - times))[:, :, None], None
        if reference.kind == "linear_generator":
            gamma = spec.gen.monotonicity_constant()
            terminal = spec.term.evaluate(field_.points)[None, :, :]
            return np.exp(gamma * (T - times))[:, :, None] * terminal, None
        oracle = self.evaluate(spec, config, backend="lattice")
        return oracle, oracle.stderr

    def demo(self, name: str, overrides: Optional[Dict[str, Any]] = None) -> RunOutcome:
        """solve + verify-field do demo empacotado, seguido da tabela de aceitação."""
        started = time.perf_counter()
        config_path = self.configs.demo_path(name)
        solve = self.solve(config_path, overrides, create_output=True)
        config = self.load(config_path, overrides)
        out = self.output_dir(config)
        spec = self.factory.build_problem(config.problem)
        field_ = self.field_repository.import_csv(solve.outputs["field_csv"])
        outcome = self.run_field_checks(spec, config, field_, out)
        outcome.command = "demo"
        outcome.outputs.update(solve.outputs)

        if config.reference is not None:
            reference, ref_stderr = self.reference_values(spec, config, field_)
            if isinstance(reference, SolutionField):
                agreement = self.fields.backend_agreement(field_, reference, config.reference.factor)
                outcome.checks["backend_agreement"] = agreement.to_dict()
                reference = reference.values
            rows, passed = self._acceptance(config, field_, reference, ref_stderr)
            outcome.table = rows
            outcome.checks["reference"] = {"passed": passed, "kind": config.reference.kind, "nodes": len(rows)}
            if not passed:
                outcome.exit_code = EXIT_FIELD
        return self._finish("demo", config_path, config, overrides, started, outcome, out)

    def _acceptance(self, config: RunConfigSchema, field_: SolutionField, reference: np.ndarray,
                    ref_stderr: Optional[np.ndarray]):
        rows = []
        for i, t in enumerate(field_.times):
            for j, x in enumerate(field_.points):
                u, ref = field_.values[i, j], reference[i, j]
                error = float(np.max(np.abs(u - ref)))
                if ref_stderr is None:
                    tol = config.reference.rel_tol * float(np.max(np.abs(ref)))
                else:
                    tol = config.reference.factor * float(np.max(field_.stderr[i, j] + ref_stderr[i, j]))
                rows.append({
                    "t": float(t), "x": x.tolist(), "u": u.tolist(), "reference": ref.tolist(),
                    "error": error, "tolerance": tol, "ok": error <= tol + 1e-12,
                })
        return rows, all(row["ok"] for row in rows)
