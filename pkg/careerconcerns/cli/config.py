import hashlib
import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.beliefs.grid import SignalSpec, DEFAULT_GRID_SIZE
from careerconcerns.cli.utils import decode_value, set_dotted
from careerconcerns.model.core import CRRA, Tabulated, Preferences, PricingRegime
from careerconcerns.solvers.finite import FiniteHorizonSpec, DEFAULT_THETA_GRID_SIZE as FINITE_GRID_SIZE
from careerconcerns.solvers.grid_tree import DEFAULT_NODE_BUDGET
from careerconcerns.solvers.stationary import LatticeSpec, DEFAULT_THETA_GRID_SIZE, DEFAULT_TOLERANCE, \
    DEFAULT_MAX_SWEEPS
from careerconcerns.solvers.sweep import SweepParameter

CONFIG_VERSION = 1


class Section(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


class CRRAConfig(Section):
    kind: Literal['crra'] = 'crra'
    rho: float = Field(0.5, gt=0, le=1)

    def build(self) -> Preferences:
        return CRRA(self.rho)


class TabulatedConfig(Section):
    kind: Literal['tabulated']
    knots: List[Tuple[float, float]] = Field(min_length=2)

    def build(self) -> Preferences:
        return Tabulated(tuple(self.knots))


PreferencesConfig = Annotated[Union[CRRAConfig, TabulatedConfig], Field(discriminator='kind')]


class PriorConfig(Section):
    alpha: float = Field(1.0, gt=0)
    beta: float = Field(1.0, gt=0)

    def build(self) -> BetaParams:
        return BetaParams(self.alpha, self.beta)


class CalibrationConfig(Section):
    prior: PriorConfig = PriorConfig()
    delta: float = Field(0.95, gt=0, lt=1)
    prefs: PreferencesConfig = CRRAConfig()
    regime: PricingRegime = PricingRegime.naive


class FiniteConfig(CalibrationConfig):
    periods: int = Field(3, ge=1)
    theta_grid_size: int = Field(FINITE_GRID_SIZE, ge=2)

    def build(self) -> FiniteHorizonSpec:
        return FiniteHorizonSpec(periods=self.periods, prior=self.prior.build(), delta=self.delta,
                                 prefs=self.prefs.build(), regime=self.regime, theta_grid_size=self.theta_grid_size)


class StationaryConfig(CalibrationConfig):
    max_depth: int = Field(12, ge=1)
    theta_grid_size: int = Field(DEFAULT_THETA_GRID_SIZE, ge=257)
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)
    max_sweeps: int = Field(DEFAULT_MAX_SWEEPS, ge=1)

    def build(self) -> LatticeSpec:
        return LatticeSpec(prior=self.prior.build(), max_depth=self.max_depth, delta=self.delta,
                           prefs=self.prefs.build(), regime=self.regime, theta_grid_size=self.theta_grid_size,
                           tolerance=self.tolerance, max_sweeps=self.max_sweeps)


class SweepConfig(Section):
    parameter: SweepParameter
    values: List[float] = Field(min_length=1)


class SignalConfig(CalibrationConfig):
    """The belief-tree solve with a public signal during firm employment."""
    phi: float = Field(0.0, ge=0, lt=1)
    zbar: float = Field(0.5, gt=0, lt=1)
    horizon: int = Field(3, ge=1)
    grid_size: int = Field(DEFAULT_GRID_SIZE, ge=2)
    node_budget: int = Field(DEFAULT_NODE_BUDGET, ge=1)
    phis: List[float] = Field(default_factory=list)

    def build(self) -> SignalSpec:
        return SignalSpec(phi=self.phi, zbar=self.zbar)


class SimulateConfig(Section):
    n_paths: int = Field(10_000, ge=1)
    horizon: int = Field(3, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    theta: Optional[float] = Field(None, ge=0, le=1)


class OutputConfig(Section):
    directory: Path = Path('results')
    format: Literal['csv', 'json'] = 'csv'


class RunConfig(Section):
    version: Literal[1] = CONFIG_VERSION
    solver: Literal['finite', 'stationary', 'grid'] = 'finite'
    finite: FiniteConfig = FiniteConfig()
    stationary: StationaryConfig = StationaryConfig()
    sweep: Optional[SweepConfig] = None
    simulate: SimulateConfig = SimulateConfig()
    signal: SignalConfig = SignalConfig()
    output: OutputConfig = OutputConfig()


def load_config(path: Optional[Path] = None, overrides: Optional[List[Tuple[str, str]]] = None) -> RunConfig:
    """Reads a JSON config (or starts from the defaults), applies ``key.path=value`` overrides and
    validates the result."""
    document = json.loads(path.read_text()) if path is not None else {}
    for key, value in overrides or []:
        set_dotted(document, key, decode_value(value))
    return RunConfig.model_validate(document)


def dump_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode='json'), sort_keys=True, indent=2)


def parse_config(raw: str) -> RunConfig:
    return RunConfig.model_validate_json(raw)


def config_hash(config: RunConfig) -> str:
    """Identifies a run by what it computes; where the results are written is not part of it."""
    document = config.model_dump(mode='json', exclude={'output': {'directory'}})
    canonical = json.dumps(document, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
