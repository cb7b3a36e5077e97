from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # sieve segment length (integers per segment)
    segment: int = 1 << 20
    # Cohen-Lenstra infinite products stop at this j
    cl_truncation: int = 64
    # default Euler product cutoff for Omega(3)
    omega_pmax: int = 10**5
    # largest combined D-range a rank table may cover
    max_table_range: int = 10**8
    # witnesses kept in a serialized WitnessReport
    witness_cap: int = 1000


DEFAULT = Config()

CACHE_ENV = "THREERANK_CACHE_DIR"
