#!/usr/bin/env python3
"""Write the bundled newform tables (level = prime above 2).

Only the eigenvalues needed by the scans are recorded.  Primes are named by
(p, f, factor_index) where factor_index is the position in the factor list
that `fermat nf-factor` prints for the bundled defining polynomial.

    python3 tools/gen_newforms.py crates/core/fixtures
"""
import json
import os
import sys

SCHEMA = "newform-table-v1"


def ev(p, f, idx, aq):
    return {"p": p, "f": f, "factor_index": idx, "aq": [str(c) for c in aq]}


def form(field, suffix, poly, degree, eigenvalues):
    return {
        "field_label": field,
        "level_norm": 2,
        "label": f"{field}-2.1-{suffix}",
        "hecke_poly": None if poly is None else [str(c) for c in poly],
        "hecke_degree": degree,
        "eigenvalues": eigenvalues,
    }


TABLES = {
    "3.3.148.1": ("LMFDB hmf_forms, level norm 2: no forms", []),
    "3.3.404.1": (
        "LMFDB hmf_forms/hmf_hecke, transcribed",
        [form("3.3.404.1", "a", [0, 1], 1, [ev(7, 1, 0, [-2])])],
    ),
    "3.3.564.1": (
        "LMFDB hmf_forms/hmf_hecke, transcribed",
        [form("3.3.564.1", "a", [-1, 3, 1], 2, [ev(3, 1, 0, [0, 1])])],
    ),
    "5.5.126032.1": (
        "LMFDB hmf_forms/hmf_hecke, transcribed",
        [form("5.5.126032.1", "a", [-3, 1, 1], 2, [ev(3, 1, 0, [0, 1])])],
    ),
    "6.6.2803712.1": (
        "Magma HilbertCuspForms, transcribed",
        [
            form(
                "6.6.2803712.1",
                "a",
                [-21, -1, 1],
                2,
                [ev(17, 1, 0, [0, 1]), ev(23, 1, 0, [-2, 1])],
            )
        ],
    ),
    "4.4.2048.1": ("LMFDB hmf_forms, level norm 2: no forms", []),
    "8.8.2147483648.1": (
        "Magma HilbertCuspForms, orbit sizes only",
        [
            form("8.8.2147483648.1", s, None, n, [])
            for s, n in zip("abcde", [4, 4, 4, 4, 24])
        ],
    ),
}


def main(out):
    os.makedirs(os.path.join(out, "newforms"), exist_ok=True)
    for label, (prov, forms) in TABLES.items():
        table = {
            "field_label": label,
            "level_norm": 2,
            "schema": SCHEMA,
            "provenance": prov,
            "forms": forms,
        }
        with open(os.path.join(out, "newforms", label + ".json"), "w") as fh:
            fh.write(json.dumps(table, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/fixtures")
