"""lindblad-lab: stationary states and uniqueness tests for boundary-driven open quantum systems."""

from .config import Settings, Tolerances, get_settings
from .lindblad import JumpSet, Liouvillian, assemble_liouvillian, build_liouvillian, decompose_hamiltonian
from .report import AnalysisReport, validate_report
from .scenarios import ScenarioConfig, load_config, run_scenario
from .spin_chain import boundary_reset_model, reproduce_chain
from .steady_state import maximal_support_state, stationary_basis
from .uniqueness import Verdict, commutant_uniqueness, bulk_uniqueness_verdict, product_closure_check

__all__ = [
    "AnalysisReport",
    "JumpSet",
    "Liouvillian",
    "ScenarioConfig",
    "Settings",
    "Tolerances",
    "Verdict",
    "assemble_liouvillian",
    "boundary_reset_model",
    "build_liouvillian",
    "bulk_uniqueness_verdict",
    "commutant_uniqueness",
    "decompose_hamiltonian",
    "get_settings",
    "load_config",
    "maximal_support_state",
    "product_closure_check",
    "reproduce_chain",
    "run_scenario",
    "stationary_basis",
    "validate_report",
]
