from qtomo.state import DensityMatrix, density_from_bloch

# ******* Reference states ***********
# poles of the Bloch sphere
KET_0 = DensityMatrix([[1, 0], [0, 0]])
KET_1 = DensityMatrix([[0, 0], [0, 1]])

# center of the Bloch sphere
MAXIMALLY_MIXED = DensityMatrix([[0.5, 0], [0, 0.5]])

# a mixed state with no particular symmetry, Bloch vector (-0.385, -0.042, 0.399)
RHO_A = DensityMatrix([[1.399 / 2, (-0.385 + 0.042j) / 2],
                       [(-0.385 - 0.042j) / 2, 0.601 / 2]])

# the pure +x state, all entries 1/2
RHO_B = density_from_bloch((1, 0, 0))
