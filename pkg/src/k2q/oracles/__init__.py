"""Independent ground truth: exact analyses, LP vertex enumeration,
ordering brute force and a global scheduling simulator."""

from .exact import busy_window_exact, tda_exact
from .lp import lp_min_ck
from .permutations import permutation_minmax
from .simulator import SimTrace, first_miss, simulate_global_fp
