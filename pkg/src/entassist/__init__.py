"""Entanglement-assisted one-bit channels and their shared-randomness simulation."""

from .channels import ClassicalChannel, Game, NonSignalingResource, assisted_channel_classical, expected_reward
from .membership import best_classical_value, in_cn_sr, verify_cn_sr_certificate
from .quantum import DensityOperator, GammaMap, Povm, maximally_entangled, phi_rho, singlet
from .simulate import ConvexDecomposition, TheoremInstance, decompose_theorem, hall_condition

__all__ = [
    "ClassicalChannel", "Game", "NonSignalingResource", "assisted_channel_classical", "expected_reward",
    "best_classical_value", "in_cn_sr", "verify_cn_sr_certificate",
    "DensityOperator", "GammaMap", "Povm", "maximally_entangled", "phi_rho", "singlet",
    "ConvexDecomposition", "TheoremInstance", "decompose_theorem", "hall_condition",
]
