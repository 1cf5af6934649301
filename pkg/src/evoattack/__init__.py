"""evoattack: evolutionary latent-space attacks on feedforward classifiers."""

from .campaign import (
    AttackRecord,
    CampaignConfig,
    CampaignResult,
    CompareRow,
    Tally,
    compare_methods,
    emit_trace,
    run_campaign,
    run_sweep,
    tally_attacks,
    tally_confusion,
)
from .ea import EAConfig, Individual, RunResult, evolve
from .fitness import AttackVerdict, FitnessKind, assess, f1, f2, is_attack_at, is_confusion_at
from .mils import MilsConfig, mils_search
from .nn import Model, classify, forward, generate, load_model, save_model, verify_golden
from .rng import Xoshiro256StarStar, derive_run_seed

__version__ = "0.1.0"

__all__ = [
    "AttackRecord",
    "AttackVerdict",
    "CampaignConfig",
    "CampaignResult",
    "CompareRow",
    "EAConfig",
    "FitnessKind",
    "Individual",
    "MilsConfig",
    "Model",
    "RunResult",
    "Tally",
    "Xoshiro256StarStar",
    "assess",
    "classify",
    "compare_methods",
    "derive_run_seed",
    "emit_trace",
    "evolve",
    "f1",
    "f2",
    "forward",
    "generate",
    "is_attack_at",
    "is_confusion_at",
    "load_model",
    "mils_search",
    "run_campaign",
    "run_sweep",
    "save_model",
    "tally_attacks",
    "tally_confusion",
    "verify_golden",
]
