"""Deceptive reactive defense synthesis with hypergames on graphs."""
from .arena import P1, P2, Arena, load_arena, save_arena, validate_arena
from .errors import CapExceeded, ModelError
from .hypergame import build_hypergame, check_stealthy, classify_states, deceptive_sure_winning, synthesize
from .logic import Dfa, parse_scltl, translate_to_dfa
from .product import ProductGame, build_product
from .solver import attractor, permissive_strategy, positional_strategy, sure_winning_regions

__version__ = "0.1.0"
