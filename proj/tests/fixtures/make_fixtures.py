#!/usr/bin/env python3
"""Regenerates the small CSV fixtures used by the tests and the example config.

The library holds five smooth synthetic reflectance curves shaped after
common land-cover materials, sampled every 10 nm from 350 to 2500 nm.
The 30x30 label map is a patchwork of rectangular fields whose borders do
not line up with the 3x3 superpixel grid, crossed by a two-pixel road.
"""
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent


def gauss(x, mu, sigma):
    return math.exp(-0.5 * ((x - mu) / sigma) ** 2)


def vegetation(w):
    visible = 0.04 + 0.05 * gauss(w, 550, 35)
    red_edge = 0.46 / (1 + math.exp(-(w - 715) / 18))
    water = 1 - 0.55 * gauss(w, 1450, 60) - 0.7 * gauss(w, 1940, 70)
    swir_drop = 1 - 0.35 / (1 + math.exp(-(w - 1300) / 150))
    return (visible + red_edge * swir_drop) * water


def soil(w):
    return 0.08 + 0.30 * (1 - math.exp(-(w - 350) / 900)) - 0.05 * gauss(w, 2200, 60)


def water(w):
    return 0.09 * math.exp(-(w - 350) / 220) + 0.005


def concrete(w):
    return 0.26 + 0.06 * (1 - math.exp(-(w - 350) / 400)) - 0.03 * gauss(w, 1900, 80)


def sand(w):
    return 0.30 + 0.28 * (1 - math.exp(-(w - 350) / 500)) - 0.06 * gauss(w, 1420, 50) \
        - 0.08 * gauss(w, 1920, 60)


MATERIALS = [("vegetation", vegetation), ("dry_soil", soil), ("water", water),
             ("concrete", concrete), ("sand", sand)]


def write_library():
    rows = ["wavelength_nm," + ",".join(n for n, _ in MATERIALS)]
    for w in range(350, 2501, 10):
        rows.append(f"{w}," + ",".join(f"{f(w):.6f}" for _, f in MATERIALS))
    (HERE / "library_5.csv").write_text("\n".join(rows) + "\n")


def write_scene_labels():
    size = 30
    col_edges = [0, 8, 17, 25, 30]
    row_edges = [0, 7, 14, 22, 30]
    pattern = [[1, 2, 5, 1],
               [2, 5, 1, 2],
               [5, 1, 2, 3],
               [1, 3, 5, 2]]
    labels = [[0] * size for _ in range(size)]
    for bi in range(4):
        for bj in range(4):
            for i in range(row_edges[bi], row_edges[bi + 1]):
                for j in range(col_edges[bj], col_edges[bj + 1]):
                    labels[i][j] = pattern[bi][bj]
    # A road of concrete running down and to the right.
    for i in range(size):
        for j in (i // 2 + 4, i // 2 + 5):
            if j < size:
                labels[i][j] = 4
    (HERE / "scene_30x30.csv").write_text(
        "\n".join(",".join(str(v) for v in row) for row in labels) + "\n")


if __name__ == "__main__":
    write_library()
    write_scene_labels()
