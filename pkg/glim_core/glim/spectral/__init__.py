from glim.spectral.operators import (
    SparseOperator,
    LocalKernel,
    adjacency,
    weighted_adjacency,
    degree_diagonal,
    local_operator,
    non_backtracking,
)
from glim.spectral.eigen import (
    SpectrumReport,
    eig_dense_symmetric,
    eig_dense_nonsymmetric,
    eig_extreme_symmetric,
    eig_top_nonsymmetric,
    esd,
    spectral_moments,
    nullity,
)
from glim.spectral.laws import kesten_mckay_density, kesten_mckay_cdf, gw_kernel_mass
from glim.spectral.identities import (
    ihara_bass_residual,
    regular_nb_from_adjacency,
    divergence_eigenvector_map,
)
