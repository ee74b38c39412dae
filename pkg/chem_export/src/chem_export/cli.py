"""Batch fixture generation: `chem-export --molecule H2 --bond 3.0 --out f.json`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .export import geometry, write_fixture


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="chem-export", description=__doc__)
    parser.add_argument("--molecule", required=True, help="H2, H4, LiH, BeH2 or N2")
    parser.add_argument("--bond", type=float, required=True, help="bond length in Angstrom")
    parser.add_argument("--out", required=True)
    parser.add_argument("--manifest", help="optional run-manifest path")
    args = parser.parse_args(argv)

    try:
        req = geometry(args.molecule, args.bond)
        result = write_fixture(req, args.out)
    except Exception as exc:  # noqa: BLE001 - batch tool surfaces everything
        print(f"chem-export: {exc}", file=sys.stderr)
        return 1
    if args.manifest:
        manifest = {
            "tool": "chem-export",
            "version": __version__,
            "molecule": args.molecule,
            "bond_length_angstrom": args.bond,
            "basis": req.basis,
            "n_qubits": result.n_qubits,
            "hf_energy": result.hf_energy,
            "fci_energy": result.fci_energy,
        }
        Path(args.manifest).write_text(json.dumps(manifest, indent=1) + "\n")
    print(
        f"{args.molecule} @ {args.bond} A -> {args.out}  "
        f"(HF {result.hf_energy:.9f} Ha, FCI {result.fci_energy} Ha)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
