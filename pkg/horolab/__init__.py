"""
horolab
Horospheres in Kobayashi hyperbolic domains

A desk-scale lab: model domains, Kobayashi distance backends, geodesics,
horofunction and horosphere estimators, Gromov/visibility probes and
boundary extension tests, with a claim-reproduction CLI.
"""

from horolab.config import LabSettings, get_settings, load_settings, reset_settings, use_settings
from horolab.errors import DomainError, HorolabError, NumericalError, ScenarioError

__version__ = "0.1.0"

__all__ = [
    "LabSettings",
    "get_settings",
    "load_settings",
    "reset_settings",
    "use_settings",
    "HorolabError",
    "DomainError",
    "NumericalError",
    "ScenarioError",
]
