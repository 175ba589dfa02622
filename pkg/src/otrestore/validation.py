"""Input validation helpers shared by the estimator and the CLI."""

import numpy as np

from .spectral import check_image


def as_image_pool(X, name="X"):
    """Coerce an (n, H, W) array or a list of 2-D arrays to a list of images."""
    if isinstance(X, np.ndarray) and X.ndim == 3:
        pool = [X[k] for k in range(X.shape[0])]
    elif isinstance(X, (list, tuple)):
        pool = list(X)
    else:
        raise ValueError(
            f"{name}: expected an (n, H, W) array or a list of 2-D arrays"
        )
    if not pool:
        raise ValueError(f"{name}: empty pool")
    pool = [check_image(img, f"{name}[{k}]") for k, img in enumerate(pool)]
    shape0 = pool[0].shape
    for k, img in enumerate(pool):
        if img.shape != shape0:
            raise ValueError(f"{name}[{k}]: shape {img.shape} != {shape0}")
    return pool
