"""Write teleport-golden.json: the teleportation table as a serialized morphism 1 -> [[...]]."""

import json
import sys

ID = [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]]
X = [[0, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]]
Z = [[1, 0, 0, -1], [0, 0, 0, 0], [0, 0, 0, 0], [-1, 0, 0, 1]]
Y = [[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]]
TABLE = [[ID, X, Z, Y], [X, ID, Y, Z], [Z, Y, ID, X], [Y, Z, X, ID]]


def bit(b):
    return "R(*)" if b else "L(*)"


def label(xy, zt):
    return f"((*,({bit(xy >> 1)},{bit(xy & 1)})),(({bit(zt >> 1)},{bit(zt & 1)}),*))"


def main(path):
    web = []
    entries = []
    for xy in range(4):
        for zt in range(4):
            block = TABLE[xy][zt]
            web.append({"label": label(xy, zt), "dim": 4, "group": []})
            # Column-major vectorisation of the 4x4 block, one input column.
            column = [[[block[r][c] / 4, 0.0]] for c in range(4) for r in range(4)]
            entries.append({"src": "*", "tgt": label(xy, zt), "in_dim": 1, "out_dim": 4, "matrix": column})
    doc = {
        "source": {"web": [{"label": "*", "dim": 1, "group": []}], "list_max": -1, "bang_max": -1},
        "target": {"web": web, "list_max": -1, "bang_max": -1},
        "entries": entries,
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "teleport-golden.json")
