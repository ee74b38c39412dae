"""Command-line surface: Hamiltonian ingestion, SCI searches, generalized
refinement, code construction, noise sweeps, and PES scans.

Every artifact is written atomically and accompanied by a `.manifest.json`
recording the command, inputs, configuration, and seed needed to reproduce
the payload byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import click

from . import __version__
from .codes import build_code_detailed, code_to_dict
from .errors import ResourceLimitError, StabciError
from .hamiltonian import (
    QubitHamiltonian,
    brute_force_ground,
    energy_stabilizer,
    hf_state_for,
    load_hamiltonian,
)
from .pauli import format_pauli, parse_pauli
from .search import (
    SearchConfig,
    SearchResult,
    adaptive_sci,
    full_sci,
    generalized_refine,
    replay_trace,
)
from .sim import (
    NoiseModel,
    build_prep_circuit,
    build_syndrome_circuit,
    run_trajectories,
)
from .tableau import amplitudes

EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_ERROR = 3

DEFAULT_SEED = 20240901
FULL_SEARCH_QUBIT_CAP = 16


def _resolve_input(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    fixtures = os.environ.get("STABCI_FIXTURES")
    if fixtures:
        candidate = Path(fixtures) / path
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"input file not found: {path}")


def _atomic_write(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, command: str, inputs: list[Path], config: dict,
                    seed: int | None, started: float) -> None:
    manifest = {
        "command": command,
        "argv": sys.argv[1:],
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "config": config,
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.monotonic() - started, 3),
    }
    _atomic_write(out.with_suffix(out.suffix + ".manifest.json"),
                  json.dumps(manifest, indent=1) + "\n")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def _result_document(h: QubitHamiltonian, result: SearchResult, method: str) -> dict:
    return {
        "molecule": h.meta.molecule,
        "bond_length_angstrom": h.meta.bond_length_angstrom,
        "n_qubits": h.n_qubits,
        "n_electrons": h.meta.n_electrons,
        "method": method,
        "energy": result.energy,
        "reference_energy": result.reference_energy,
        "fci_energy": h.meta.fci_energy,
        "amplitudes": {
            k: float(v) for k, v in sorted(amplitudes(result.state).items())
        },
        "trace": [
            {"pauli": format_pauli(e.unsigned()), "l": l} for e, l in result.trace
        ],
        "stats": {
            "n_enumerated": result.stats.n_enumerated,
            "n_skipped": result.stats.n_skipped,
            "n_distinct": result.stats.n_distinct,
        },
    }


def _run_search(h: QubitHamiltonian, method: str, config: SearchConfig):
    if method == "auto":
        method = "full" if h.n_qubits <= FULL_SEARCH_QUBIT_CAP else "adaptive"
    search = full_sci if method == "full" else adaptive_sci
    return search(h, hf_state_for(h), config), method


def _load_result_trace(path: Path, h: QubitHamiltonian):
    doc = json.loads(path.read_text())
    trace = tuple(
        (parse_pauli(t["pauli"], h.n_qubits, allow_sign=False), int(t["l"]))
        for t in doc["trace"]
    )
    return trace


class _Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ResourceLimitError as exc:
            click.echo(f"stabci: resource limit: {exc}", err=True)
            sys.exit(EXIT_RESOURCE_ERROR)
        except (StabciError, ValueError, OSError, KeyError) as exc:
            click.echo(f"stabci: {exc}", err=True)
            sys.exit(EXIT_INPUT_ERROR)


@click.group(cls=_Cli)
@click.version_option(__version__)
def main() -> None:
    """Stabilizer-CI toolkit."""


# -- sci ---------------------------------------------------------------------


@main.group()
def sci() -> None:
    """Stabilizer-CI ground-state searches."""


def _search_options(fn):
    fn = click.option("--hamiltonian", "hamiltonian", required=True)(fn)
    fn = click.option("--out", "out", required=True, type=click.Path())(fn)
    fn = click.option("--beam", default=1, show_default=True)(fn)
    fn = click.option("--accept-tol", default=1e-10, show_default=True,
                      help="minimum strict energy decrease for adaptive moves")(fn)
    fn = click.option("--max-partition-blocks", type=int, default=None,
                      help="cap on generators per excitation set (full search)")(fn)
    fn = click.option("--jobs", default=1, show_default=True, help="parallelism hint")(fn)
    return fn


def _sci_command(method, hamiltonian, out, beam, accept_tol, max_partition_blocks, jobs):
    started = time.monotonic()
    src = _resolve_input(hamiltonian)
    h = load_hamiltonian(src)
    config = SearchConfig(
        beam_width=beam,
        accept_tol=accept_tol,
        max_partition_blocks=max_partition_blocks,
        jobs=jobs,
    )
    result, method = _run_search(h, method, config)
    doc = _result_document(h, result, method)
    out_path = Path(out)
    _atomic_write(out_path, json.dumps(doc, indent=1) + "\n")
    _write_manifest(out_path, f"sci {method}", [src],
                    {"beam": beam, "accept_tol": accept_tol,
                     "max_partition_blocks": max_partition_blocks, "jobs": jobs},
                    None, started)
    click.echo(f"{h.meta.molecule}: E_stab = {result.energy:.12g} Ha -> {out}")


@sci.command("full")
@_search_options
def sci_full(hamiltonian, out, beam, accept_tol, max_partition_blocks, jobs):
    """Exhaustive excitation-set search."""
    _sci_command("full", hamiltonian, out, beam, accept_tol, max_partition_blocks, jobs)


@sci.command("adaptive")
@_search_options
def sci_adaptive(hamiltonian, out, beam, accept_tol, max_partition_blocks, jobs):
    """Adaptive double-excitation search."""
    _sci_command("adaptive", hamiltonian, out, beam, accept_tol, max_partition_blocks, jobs)


# -- refine -------------------------------------------------------------------


@main.command()
@click.option("--hamiltonian", required=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["auto", "full", "adaptive"]), default="auto")
@click.option("--beam", default=1, show_default=True)
def refine(hamiltonian, out, method, beam):
    """Search, then free the final excitation amplitude."""
    started = time.monotonic()
    src = _resolve_input(hamiltonian)
    h = load_hamiltonian(src)
    result, method = _run_search(h, method, SearchConfig(beam_width=beam))
    refined = generalized_refine(h, result)
    doc = _result_document(h, result, method)
    doc["refined"] = refined.refined
    doc["energy_generalized"] = refined.energy
    if refined.generalized is not None:
        doc["theta_star"] = refined.generalized.theta
        doc["generalized_excitation"] = format_pauli(refined.generalized.excitation.unsigned())
        doc["generalized_l"] = refined.generalized.l
    out_path = Path(out)
    _atomic_write(out_path, json.dumps(doc, indent=1) + "\n")
    _write_manifest(out_path, "refine", [src], {"method": method, "beam": beam}, None, started)
    click.echo(f"{h.meta.molecule}: E_gen = {refined.energy:.12g} Ha -> {out}")


# -- code ----------------------------------------------------------------------


@main.group()
def code() -> None:
    """Error-detection code construction."""


@code.command("build")
@click.option("--hamiltonian", required=True)
@click.option("--result", "result_path", type=click.Path(), default=None,
              help="SearchResult JSON; skips the search")
@click.option("--out", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["auto", "full", "adaptive"]), default="auto")
def code_build(hamiltonian, result_path, out, method):
    """Derive the [[n,1,2]] code whose codespace holds the best state."""
    started = time.monotonic()
    src = _resolve_input(hamiltonian)
    h = load_hamiltonian(src)
    inputs = [src]
    if result_path:
        rp = _resolve_input(result_path)
        inputs.append(rp)
        trace = _load_result_trace(rp, h)
        state = replay_trace(hf_state_for(h), trace)
    else:
        result, method = _run_search(h, method, SearchConfig())
        state = result.state
    build = build_code_detailed(state)
    out_path = Path(out)
    _atomic_write(out_path, json.dumps(code_to_dict(build), indent=1) + "\n")
    _write_manifest(out_path, "code build", inputs, {"method": method}, None, started)
    click.echo(f"[[{build.code.n_qubits},1,2]] code -> {out}")


# -- noise ----------------------------------------------------------------------


@main.command("noise")
@click.argument("action", type=click.Choice(["run"]))
@click.option("--hamiltonian", required=True)
@click.option("--result", "result_path", type=click.Path(), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--trajectories", default=1000, show_default=True)
@click.option("--p-depol", "p_depols", type=float, multiple=True,
              help="repeatable; defaults to 0.001 0.005 0.01 0.02 0.05")
@click.option("--p-bitflip", type=float, default=None,
              help="defaults to half of p-depol")
@click.option("--protected/--unprotected", "protected", default=None,
              help="default: both modes")
@click.option("--seed", default=DEFAULT_SEED, show_default=True)
@click.option("--method", type=click.Choice(["auto", "full", "adaptive"]), default="auto")
def noise_run(action, hamiltonian, result_path, out, trajectories, p_depols,
              p_bitflip, protected, seed, method):
    """Monte-Carlo noisy preparation sweep; CSV output."""
    started = time.monotonic()
    src = _resolve_input(hamiltonian)
    h = load_hamiltonian(src)
    inputs = [src]
    if result_path:
        rp = _resolve_input(result_path)
        inputs.append(rp)
        trace = _load_result_trace(rp, h)
    else:
        result, method = _run_search(h, method, SearchConfig())
        trace = result.trace
    if not trace:
        raise StabciError("best state is the reference determinant; nothing to protect")
    hf_bits = (1 << h.meta.n_electrons) - 1
    state = replay_trace(hf_state_for(h), trace)
    prep = build_prep_circuit(trace, hf_bits, h.n_qubits)
    syndrome = build_syndrome_circuit(build_code_detailed(state).code)

    grid = list(p_depols) if p_depols else [0.001, 0.005, 0.01, 0.02, 0.05]
    modes = [True, False] if protected is None else [protected]
    rows = ["p_depol,p_bitflip,n_traj,n_kept,discard_rate,mean_overlap,stderr,mode,seed"]
    for p in grid:
        noise_model = NoiseModel(p, p_bitflip)
        for is_protected in modes:
            rep = run_trajectories(
                prep, syndrome if is_protected else None, noise_model,
                state, trajectories, seed,
            )
            rows.append(",".join([
                _fmt(p), _fmt(noise_model.bitflip()), str(rep.n_traj), str(rep.n_kept),
                _fmt(rep.discard_rate), _fmt(rep.mean_overlap), _fmt(rep.stderr),
                "protected" if is_protected else "unprotected", str(seed),
            ]))
    out_path = Path(out)
    _atomic_write(out_path, "\n".join(rows) + "\n")
    _write_manifest(out_path, "noise run", inputs,
                    {"trajectories": trajectories, "grid": grid,
                     "p_bitflip": p_bitflip, "modes": len(modes)}, seed, started)
    click.echo(f"{len(rows) - 1} sweep rows -> {out}")


# -- pes -------------------------------------------------------------------------


@main.command("pes")
@click.argument("action", type=click.Choice(["scan"]))
@click.option("--hamiltonian-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["auto", "full", "adaptive"]), default="auto")
def pes_scan(action, hamiltonian_dir, out, method):
    """Potential-energy-surface scan over a directory of Hamiltonian files."""
    started = time.monotonic()
    directory = Path(hamiltonian_dir)
    files = sorted(p for p in directory.glob("*.json") if p.name != "manifest.json")
    if not files:
        raise StabciError(f"no Hamiltonian files in {directory}")
    rows = ["bond_length,E_HF,E_stab,E_gen,E_FCI"]
    entries = []
    for path in files:
        h = load_hamiltonian(path)
        result, used = _run_search(h, method, SearchConfig())
        refined = generalized_refine(h, result)
        e_hf = energy_stabilizer(h, hf_state_for(h))
        entries.append((h.meta.molecule, h.meta.bond_length_angstrom, e_hf,
                        result.energy, refined.energy, h.meta.fci_energy))
    entries.sort(key=lambda r: (r[0], r[1]))
    for _molecule, bond, e_hf, e_stab, e_gen, e_fci in entries:
        rows.append(",".join([
            _fmt(bond), _fmt(e_hf), _fmt(e_stab), _fmt(e_gen), _fmt(e_fci),
        ]))
    out_path = Path(out)
    _atomic_write(out_path, "\n".join(rows) + "\n")
    _write_manifest(out_path, "pes scan", files, {"method": method}, None, started)
    click.echo(f"{len(entries)} PES rows -> {out}")


# -- oracle -----------------------------------------------------------------------


@main.command("oracle")
@click.argument("action", type=click.Choice(["ground"]))
@click.option("--hamiltonian", required=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--max-qubits", default=12, show_default=True)
def oracle_ground(action, hamiltonian, out, max_qubits):
    """Exact lowest eigenvalue of the qubit Hamiltonian (small n)."""
    started = time.monotonic()
    src = _resolve_input(hamiltonian)
    h = load_hamiltonian(src)
    energy, residual = brute_force_ground(h, qubit_cap=max_qubits)
    click.echo(f"{h.meta.molecule}: E0 = {energy:.12g} Ha (residual {residual:.3g})")
    if out:
        out_path = Path(out)
        doc = {"molecule": h.meta.molecule,
               "bond_length_angstrom": h.meta.bond_length_angstrom,
               "energy": energy, "residual": residual}
        _atomic_write(out_path, json.dumps(doc, indent=1) + "\n")
        _write_manifest(out_path, "oracle ground", [src],
                        {"max_qubits": max_qubits}, None, started)


if __name__ == "__main__":
    main()
