"""Numerical laboratory for Jacob's ladder factorization formulas.

Hardy Z evaluation, the Hardy-Littlewood integral, the ladder phi1 and its
reverse iterates, mean-value factorization of admissible functions and
the interaction identities built from them.
"""

__version__ = "0.1.0"

from .config import NumericsConfig, load_config  # noqa: E402
from .errors import LadderError  # noqa: E402
from .factorizer import AbscissaSet, Factorizer, FactorizationRecord, mean_value_H  # noqa: E402
from .functions import AdmissibleFunction, library, lookup, power_signal  # noqa: E402
from .hl_integral import IntegralCheckpointTable, LocalIntegral, default_table_path, hl_I  # noqa: E402
from .interactions import (IdentityReport, pairwise_interaction, second_level,  # noqa: E402
                           second_level_pair, trig_identity, triple_interaction,
                           zt_power_signal)
from .ladder import Ladder, LadderChain  # noqa: E402
from .zeta_eval import Z_oracle, em_zeta_oracle, hardy_Z, rs_theta  # noqa: E402

__all__ = [
    "AbscissaSet", "AdmissibleFunction", "Factorizer", "FactorizationRecord", "IdentityReport",
    "IntegralCheckpointTable", "Ladder", "LadderChain", "LadderError", "LocalIntegral",
    "NumericsConfig", "Z_oracle", "default_table_path", "em_zeta_oracle", "hardy_Z", "hl_I",
    "library", "load_config", "lookup", "mean_value_H", "pairwise_interaction", "power_signal",
    "rs_theta", "second_level", "second_level_pair", "trig_identity", "triple_interaction",
    "zt_power_signal",
]
