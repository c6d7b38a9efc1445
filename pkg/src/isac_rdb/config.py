"""Scenario files: strict JSON schema mapping onto the library's config objects.

All powers and variances are linear. Unknown keys are rejected. A
``comment`` string (or list of strings) is allowed at the top level and in
every section for unit notes such as dB conversions.
"""

import json
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .channels import SystemConfig
from .occupancy import OccupancyConfig

Comment = Optional[Union[str, List[str]]]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)
    comment: Comment = None


class SystemSection(_Strict):
    M: int = Field(4, ge=1)
    N_s: int = Field(4, ge=1)
    N_c: int = Field(4, ge=1)
    T: int = Field(16, ge=1)
    P0: float = Field(1.0, gt=0)
    sigma2_s: float = Field(1.0, gt=0)
    sigma2_c: float = Field(1.0, gt=0)


class NakagamiSection(_Strict):
    m_s: float = Field(1.0, gt=0)
    omega_s: float = Field(1.0, gt=0)
    m_c: float = Field(1.0, gt=0)
    omega_c: float = Field(1.0, gt=0)


class OccupancySection(_Strict):
    p1: float = Field(0.5, gt=0, lt=1)
    alpha_mag: float = Field(0.2, ge=0)
    phi_deg: float = -37.0
    sigma2_W: float = Field(0.0, ge=0)


class RunSection(_Strict):
    seed: int = Field(0, ge=0)
    n_draws: int = Field(2000, ge=2)
    n_sweep: int = Field(25, ge=1)


class Scenario(_Strict):
    system: SystemSection = SystemSection()
    nakagami: NakagamiSection = NakagamiSection()
    occupancy: Optional[OccupancySection] = None
    run: RunSection = RunSection()

    def system_config(self) -> SystemConfig:
        s, n = self.system, self.nakagami
        return SystemConfig(M=s.M, N_s=s.N_s, N_c=s.N_c, T=s.T, P0=s.P0, sigma2_s=s.sigma2_s,
                            sigma2_c=s.sigma2_c, m_s=n.m_s, omega_s=n.omega_s, m_c=n.m_c, omega_c=n.omega_c)

    def occupancy_config(self, paper_kl_convention: bool = True) -> OccupancyConfig:
        if self.occupancy is None:
            raise ValueError("scenario has no occupancy section")
        o = self.occupancy
        return OccupancyConfig.build(self.system_config(), p1=o.p1, alpha_mag=o.alpha_mag, phi_deg=o.phi_deg,
                                     sigma2_W=o.sigma2_W, seed=self.run.seed,
                                     paper_kl_convention=paper_kl_convention)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(exclude_none=True), indent=2) + "\n"


class ScenarioError(ValueError):
    pass


def parse_scenario(text: str) -> Scenario:
    try:
        return Scenario.model_validate_json(text)
    except ValidationError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(text)


def bundled_scenario(name: str) -> Path:
    """Path of a scenario shipped with the package (``table1`` or ``table2``)."""
    p = Path(__file__).parent / "scenarios" / f"{name}.json"
    if not p.exists():
        raise ScenarioError(f"no bundled scenario {name!r}")
    return p
