from qtomo.states.base import KET_0, KET_1, MAXIMALLY_MIXED, RHO_A, RHO_B

__all__ = [
    'KET_0', 'KET_1', 'MAXIMALLY_MIXED', 'RHO_A', 'RHO_B'
]
