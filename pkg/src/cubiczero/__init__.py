"""Exact and high-precision tools for the least zero of a cubic form."""

from .forms import CubicForm, parse_form, height, rank_of, rank_census, delta_invariant
from .expsums import complete_sum, A_of_q, local_count, singular_series
from .exponents import eop0, delta0, e_of, theta_of, e2_of, table_report
from .search import find_least_zero

__version__ = "0.1.0"
