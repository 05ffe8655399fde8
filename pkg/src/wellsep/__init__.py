"""k-means seeding strategies on provably well-separated clusters."""
from .core import (Clustering, UsageError, centroid, cost_centroid_form, cost_pairwise_form,
                   squared_distance)
from .datagen import NOISE, GenConfig, LabeledDataset, generate
from .evaluation import rel_tot_within_ss, summarize, tot_within_ss, wrong_clusters_pct
from .lloyd import InvariantError, LloydConfig, LloydResult, run
from .seeding import SeedingMethod, SeedSet, seed
from .separation import brute_force_optimum, min_gap_threshold, verify

__version__ = "0.1.0"
