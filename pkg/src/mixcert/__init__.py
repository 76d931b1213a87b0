"""Exact random-walk mixing and expansion certificates on regular graphs, plus long cycles."""

__version__ = "0.1.0"

from .errors import (CycleNotFoundError, ExtractionError, GenerationError, GraphError,
                     HypothesisError, InfeasibleError, MixcertError, NotRegularError, ParseError)
from .graph import (Graph, components, disjoint_union, edge_boundary, induced, neighborhood,
                    parse_edge_list, vertex_set)
from .generators import ConstructionSpec, generate, parse_descriptor
from .walks import (Distribution, MixingProfile, count_walks, distribution_at,
                    flow_symmetry_defect, is_mixing_vertex, mixing_profile, mixing_time,
                    smallest_tau, stay_probability, tv_distance, vertex_mixing_time,
                    walk_counts, well_mixing_set)
from .expansion import (check_edge_expansion, conductance, extract_expander, find_separator,
                        sandwich_check, separator_lower_bound)
from .cycles import (find_long_cycle, longest_cycle_oracle, mixing_to_cycle, validate_cycle,
                     verify_neighborhood_condition)
from .amplification import (bad_set_ladder, delta0, eta_schedule, no_visit_probability,
                            verify_amplification)
