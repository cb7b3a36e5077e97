"""3-ranks of quadratic class groups via binary cubic forms, with finite-X
checks of the surrounding density statements."""
from .arith import (ALL, CongruenceClass, FundamentalDiscriminant, count_S, enumerate_S,
                    fundamental_discriminant_of, is_fundamental, mobius_range)
from .bqf import oracle_three_rank
from .family import FamilySpec, LinearPolynomial, is_good_pair, normalize, parse_family
from .rank3 import RankTable, rank_table, three_rank
from .statistics import DensityReport, cohen_lenstra_prob, omega3_product
from .search import WitnessReport, polyprog_witness, theorem1_witnesses

__version__ = "0.1.0"
