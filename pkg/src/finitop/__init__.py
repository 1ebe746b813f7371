"""Finite-space models for LS-category, sequential topological complexity,
(co)homological dimension, and audits of their behaviour under retractions."""

from .covers import Budget, Cover, admits_planner, cat_map, cat_space, extract_planner, restrict_cover, tc_map, tc_space
from .errors import FinitopError, ParseError, SearchBudgetExceeded
from .finspace import FiniteSpace, SpaceMap, chain, cone, discrete, point_space, pseudocircle
from .homotopy import HomotopyEngine, are_homotopic, core, is_contractible, is_nullhomotopic
from .retracts import RetractionSquare, audit_monotonicity, enumerate_retractions, verify_square

__version__ = "0.1.0"
