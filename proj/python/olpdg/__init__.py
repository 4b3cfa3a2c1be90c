"""Open-loop potential difference games: LQ solver, certificates and smart-grid model."""

from ._olpdg import (
    Certificate,
    Equilibrium,
    Game,
    LcpResult,
    Scenario,
    certify,
    check_potential,
    default_scenario,
    lemke_solve,
    load,
    parse,
    smartgrid_report,
    solve,
)

__all__ = [
    "Certificate",
    "Equilibrium",
    "Game",
    "LcpResult",
    "Scenario",
    "certify",
    "check_potential",
    "default_scenario",
    "lemke_solve",
    "load",
    "parse",
    "smartgrid_report",
    "solve",
]
