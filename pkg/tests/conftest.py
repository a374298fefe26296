import struct

import numpy as np


def write_idx_pair(images_path, labels_path, images, labels):
    """Write a (samples, rows, cols) uint8 stack and labels as IDX files."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", 0x00000803, count, rows, cols))
        fh.write(images.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", 0x00000801, labels.size))
        fh.write(labels.tobytes())


def digits_idx_split(tmp_path, n_train=1000, n_test=200, seed=42):
    """Seeded train/test IDX fixture from the bundled handwritten digits."""
    from sklearn.datasets import load_digits

    digits = load_digits()
    pixels = np.round(digits.images * (255.0 / 16.0)).astype(np.uint8)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(digits.target))
    paths = {}
    for name, idx in (("train", perm[:n_train]), ("test", perm[n_train:n_train + n_test])):
        img_path = str(tmp_path / f"{name}-images.idx")
        lab_path = str(tmp_path / f"{name}-labels.idx")
        write_idx_pair(img_path, lab_path, pixels[idx], digits.target[idx])
        paths[name] = (img_path, lab_path)
    return paths
