"""Quantum-limited sensitivity of lambda-class interferometers under dephasing.

Closed-form and brute-force quantum Fisher information for GHZ probes,
dephasing channels with independent oracles, a first-principles Sagnac ring
simulator and repetition-code logical probes.
"""

__version__ = "0.1.0"
