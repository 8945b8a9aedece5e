"""Simulation and analysis of data signaling over a droop-controlled DC microgrid bus."""

from .grid import BusState, GridConfig, Symbol, UnitParams, alpha_beta, bus_voltage, droop_slope, output_current_a
from .constellation import Constellation, fixed_rd, fixed_va

__version__ = "0.1.0"
