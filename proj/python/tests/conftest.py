import os
import pathlib

import numpy as np
import pytest

DATA = pathlib.Path(os.environ.get("SURFELGRAD_DATA", pathlib.Path(__file__).resolve().parents[2] / "tests" / "data"))


def read_pfm(path):
    with open(path, "rb") as f:
        magic = f.readline().strip()
        cols, rows = (int(v) for v in f.readline().split())
        scale = float(f.readline())
        channels = 3 if magic == b"PF" else 1
        raster = np.frombuffer(f.read(), dtype="<f4" if scale < 0 else ">f4")
    # Bottom row first on disk.
    shape = (rows, cols, 3) if channels == 3 else (rows, cols)
    return np.ascontiguousarray(raster.reshape(shape)[::-1].astype(np.float64))


class Golden:
    def __init__(self, root):
        import json

        self.camera = (root / "camera.json").read_text()
        self.material = (root / "material.json").read_text()
        self.lights = (root / "lights.json").read_text()
        self.depth = read_pfm(root / "depth.pfm")
        self.upstream = read_pfm(root / "upstream.pfm")
        self.expected = json.loads((root / "expected.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return Golden(DATA / "golden")
