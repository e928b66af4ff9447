"""co2calc: an executable kernel for the CO2 contract calculus.

The calculus is generic over a contract model; two models are provided:
CCS-style process contracts (:mod:`co2calc.ccs`) and the propositional
contract logic (:mod:`co2calc.pcl`).  :mod:`co2calc.encoding` translates the
clausal fragment of the logic into processes.
"""
__version__ = "0.1.0"
