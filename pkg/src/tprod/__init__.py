"""Tensor-tensor products and SVD-type decompositions via block convolution.

Two products over arbitrary-order dense tensors: the periodic-boundary
product diagonalized slice-wise by the Fourier transform, and the
reflective-boundary product diagonalized by a scaled discrete cosine
transform with an all-real pipeline.  Both come with exact SVD-style
decompositions, truncation/double-filtering, factor-storage compression,
nearest-subspace classification, and clustering feature extraction.
"""

from .backend import active_backend, available_backends, set_backend
from .core import (
    as_tensor,
    contract,
    frob,
    middle_indices,
    middle_shape,
    middle_slice,
    mode_n_product,
    set_middle_slice,
    slicewise_product,
    t_transpose,
    tc_transpose,
)
from .transforms import (
    DctBasis,
    GammaOperator,
    apply_cosine_modes,
    apply_fourier_modes,
    dct_basis,
    gamma_apply,
    gamma_solve,
)
from .products import (
    ProductKind,
    from_transform,
    identity_tensor,
    product,
    relative_error,
    tcproduct,
    to_transform,
    tproduct,
)
from .decomp import (
    TcFactors,
    double_filter,
    reconstruct,
    slice_singular_values,
    tcsvd,
    to_domain,
    truncate,
    tsvd,
)
from .apps import (
    ClassifierModel,
    CompressedArchive,
    FeatureMatrix,
    classifier_fit,
    classifier_predict,
    compress,
    decompress,
    extract_features,
    kmeans,
    nmi,
    psnr,
)
from .io import (
    FormatError,
    SyntheticSpec,
    gen_synthetic,
    read_archive,
    read_idx,
    read_tensor,
    write_archive,
    write_tensor,
)

__version__ = "0.1.0"
