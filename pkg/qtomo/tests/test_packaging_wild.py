from qtomo import *  # this relies on '__all__'


def test_wild_import():
    o = DensityMatrix
    p = RHO_B
    q = parse_spec
