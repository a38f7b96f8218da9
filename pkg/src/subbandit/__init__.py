"""Online submodular maximization under knapsack and k-system constraints."""

from .constraints import ConstraintSystem, KnapsackConstraint, KSystem, PartitionMatroid, UniformMatroid, build_constraints
from .linucb import BetaSchedule, Scorer, UcbState
from .oracle import RegretLedger, alpha_from_config, brute_force_opt, offline_greedy_ksystem
from .policies import ThresholdSchedule, afsm_ucb_round, c_greedy_round, gm_ucb, lsb_greedy_round, random_round
from .submod_core import CoverageProfile, LinearSubmodularModel, ModularValueModel

__version__ = "0.1.0"
