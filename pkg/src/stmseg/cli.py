"""Command-line front end: segment single files, degrade audio, evaluate a
corpus, and sweep the degradation grids.

Corpora are directories (searched recursively) of paired `<name>.wav` and
`<name>.phn` files. Reports are written as CSV/JSON plus rendered figures;
figures can be switched off with --no-figures. Exit codes: 0 success,
2 usage, 3 I/O, 4 malformed or unsupported input.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import __version__
from .degrade import (
    ClipSpec,
    NoiseSpec,
    apply_awgn,
    clip_at,
    clip_threshold,
    noise_sigma,
    normalize_peak,
)
from .errors import (
    DegenerateSignalError,
    FormatError,
    ParameterError,
    TooShortSignalError,
)
from .evaluate import EvalConfig, EvalReport, corpus_eval
from .features import DEFAULT_N_COEFFS, FrameConfig, extract
from .signal_io import (
    AudioBuffer,
    BoundarySet,
    read_phone_transcription,
    read_wav,
    reference_boundaries,
    write_boundaries,
    write_wav,
)
from .stm import StmConfig, median_floor, pick_peaks, stm_contour, write_contour_csv

DEFAULT_CLIP_GRID = (10.0, 30.0, 50.0, 70.0, 90.0)
DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0)
BASELINE = "baseline"
PROPOSED = "proposed"


@dataclass
class RunConfig:
    """Everything a command run needs beyond its input path."""

    feature_kind: str = "plp"
    postprocess: str = "on"
    halfwidth: int = 2
    n_coeffs: int = DEFAULT_N_COEFFS
    frame: FrameConfig = field(default_factory=FrameConfig)
    tolerances_ms: tuple[float, ...] = (20.0,)
    seed: int = 0
    headroom: float = 0.5
    clip_percents: tuple[float, ...] = DEFAULT_CLIP_GRID
    snr_dbs: tuple[float, ...] = DEFAULT_SNR_GRID
    out_dir: Path = Path(".")
    figures: bool = True

    def variants(self) -> list[str]:
        return {
            "on": [PROPOSED],
            "off": [BASELINE],
            "both": [BASELINE, PROPOSED],
        }[self.postprocess]


def file_seed(global_seed: int, name: str) -> int:
    """Per-file noise seed: global seed XOR a stable hash of the file name,
    so corpora can be degraded in parallel yet reproducibly."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return (global_seed ^ int.from_bytes(digest, "little")) & (2**64 - 1)


@dataclass(frozen=True)
class CorpusPair:
    name: str
    wav_path: Path
    phn_path: Path


def find_pairs(corpus_dir: Path) -> list[CorpusPair]:
    """Paired wav/phn files under corpus_dir, in deterministic name order.
    Unpaired wavs are reported to stderr and skipped."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise click.UsageError(f"not a corpus directory: {corpus_dir}")
    wavs = sorted(
        (p for p in corpus_dir.rglob("*") if p.is_file() and p.suffix.lower() == ".wav"),
        key=lambda p: p.relative_to(corpus_dir).as_posix(),
    )
    pairs: list[CorpusPair] = []
    for wav in wavs:
        phn = next(
            (c for s in (".phn", ".PHN") if (c := wav.with_suffix(s)).is_file()),
            None,
        )
        if phn is None:
            click.echo(f"warning: no transcription for {wav}, skipped", err=True)
            continue
        name = wav.relative_to(corpus_dir).as_posix()
        pairs.append(CorpusPair(name, wav, phn))
    if not pairs:
        raise click.UsageError(f"no wav/phn pairs under {corpus_dir}")
    return pairs


def load_pair(pair: CorpusPair) -> tuple[AudioBuffer, BoundarySet]:
    audio = read_wav(pair.wav_path)
    t = read_phone_transcription(pair.phn_path, audio.sample_rate_hz)
    return audio, reference_boundaries(t, audio.sample_rate_hz)


def detect_variants(audio: AudioBuffer, cfg: RunConfig) -> dict[str, BoundarySet]:
    """Segment once per requested variant, sharing the contour computation."""
    feats = extract(cfg.feature_kind, audio, cfg.frame, cfg.n_coeffs)
    raw = stm_contour(feats, StmConfig(regression_halfwidth=cfg.halfwidth))
    out: dict[str, BoundarySet] = {}
    for variant in cfg.variants():
        if variant == BASELINE:
            out[variant] = pick_peaks(raw)
        else:
            out[variant] = pick_peaks(median_floor(raw))
    return out


def cmd_segment(wav_path: Path, cfg: RunConfig, dump_contour: bool = False) -> Path:
    """Segment one file; returns the boundary file path."""
    audio = read_wav(wav_path)
    feats = extract(cfg.feature_kind, audio, cfg.frame, cfg.n_coeffs)
    raw = stm_contour(feats, StmConfig(regression_halfwidth=cfg.halfwidth))
    floored = median_floor(raw) if cfg.postprocess == "on" else None
    boundaries = pick_peaks(floored if floored is not None else raw)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(wav_path).stem
    bnd_path = cfg.out_dir / f"{stem}.bnd"
    write_boundaries(bnd_path, boundaries)
    if dump_contour:
        write_contour_csv(cfg.out_dir / f"{stem}.contour.csv", raw, floored)
    return bnd_path


def _aggregate(
    sets_by_variant: dict[str, list[tuple[BoundarySet, BoundarySet]]],
    tolerances_ms: tuple[float, ...],
) -> dict[str, list[EvalReport]]:
    return {
        variant: [corpus_eval(pairs, EvalConfig(tol)) for tol in tolerances_ms]
        for variant, pairs in sets_by_variant.items()
    }


def cmd_evaluate(corpus_dir: Path, cfg: RunConfig) -> dict[str, list[EvalReport]]:
    """Evaluate a corpus; writes evaluation.csv/.json (and a figure)."""
    pairs = find_pairs(corpus_dir)
    sets: dict[str, list[tuple[BoundarySet, BoundarySet]]] = {
        v: [] for v in cfg.variants()
    }
    for pair in pairs:
        audio, ref = load_pair(pair)
        for variant, det in detect_variants(audio, cfg).items():
            sets[variant].append((ref, det))
    reports = _aggregate(sets, cfg.tolerances_ms)

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = cfg.out_dir / "evaluation.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["variant", "tolerance_ms", "matched", "detected", "reference",
             "precision_pct", "recall_pct", "fscore_pct"]
        )
        for variant in cfg.variants():
            for r in reports[variant]:
                writer.writerow(
                    [variant, repr(r.tolerance_ms), r.matched, r.detected,
                     r.reference, repr(r.precision_pct), repr(r.recall_pct),
                     repr(r.fscore_pct)]
                )
    json_path = cfg.out_dir / "evaluation.json"
    payload = {
        "corpus": str(corpus_dir),
        "features": cfg.feature_kind,
        "reports": {v: [r.to_dict() for r in rs] for v, rs in reports.items()},
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    if cfg.figures:
        from . import plots

        plots.render_eval_figure(reports, cfg.out_dir / "evaluation.png")
    return reports


def _degraded(
    audio: AudioBuffer, condition: str, level: float | None, cfg: RunConfig, name: str
) -> AudioBuffer:
    if condition == "clean":
        return audio
    if condition == "clip":
        return clip_at(audio, clip_threshold(audio, ClipSpec(level)))
    if condition == "noise":
        spec = NoiseSpec(level, file_seed(cfg.seed, Path(name).name))
        return apply_awgn(normalize_peak(audio, cfg.headroom), spec)
    raise ParameterError(f"unknown condition {condition!r}")


def cmd_sweep(corpus_dir: Path, cfg: RunConfig) -> Path:
    """Degradation sweep over the clip/noise grids plus a clean reference
    condition; writes sweep.csv (and per-condition figures)."""
    pairs = find_pairs(corpus_dir)
    conditions: list[tuple[str, float | None]] = [("clean", None)]
    conditions += [("clip", p) for p in cfg.clip_percents]
    conditions += [("noise", s) for s in cfg.snr_dbs]

    rows: list[dict] = []
    for condition, level in conditions:
        sets: dict[str, list[tuple[BoundarySet, BoundarySet]]] = {
            v: [] for v in cfg.variants()
        }
        for pair in pairs:
            audio, ref = load_pair(pair)
            degraded = _degraded(audio, condition, level, cfg, pair.name)
            for variant, det in detect_variants(degraded, cfg).items():
                sets[variant].append((ref, det))
        for variant, reports in _aggregate(sets, cfg.tolerances_ms).items():
            for r in reports:
                rows.append(
                    {
                        "condition": condition,
                        "level": level,
                        "variant": variant,
                        "tolerance_ms": r.tolerance_ms,
                        "precision": r.precision_pct,
                        "recall": r.recall_pct,
                        "fscore": r.fscore_pct,
                    }
                )

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = cfg.out_dir / "sweep.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["condition", "level", "variant", "tolerance_ms",
             "precision", "recall", "fscore"]
        )
        for row in rows:
            writer.writerow(
                [row["condition"],
                 "" if row["level"] is None else repr(row["level"]),
                 row["variant"], repr(row["tolerance_ms"]),
                 repr(row["precision"]), repr(row["recall"]), repr(row["fscore"])]
            )
    if cfg.figures:
        from . import plots

        plots.render_sweep_figure(
            rows, "clip", "clipped samples (%)", cfg.out_dir / "sweep_clip.png"
        )
        plots.render_sweep_figure(
            rows, "noise", "SNR (dB)", cfg.out_dir / "sweep_noise.png"
        )
    return csv_path


def _parse_float_list(ctx, param, value):
    try:
        vals = tuple(float(v) for v in str(value).split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")
    if not vals:
        raise click.BadParameter("list must not be empty")
    return vals


def _parse_tolerances(ctx, param, value):
    vals = _parse_float_list(ctx, param, value)
    if any(v <= 0 for v in vals):
        raise click.BadParameter("tolerances must be positive")
    return vals


_features_opt = click.option(
    "--features", "feature_kind", type=click.Choice(["plp", "mfcc"]),
    default="plp", show_default=True, help="Feature kind to segment with.",
)
_out_opt = click.option(
    "--out", "out_dir", type=click.Path(path_type=Path), default=Path("."),
    show_default=True, help="Directory for written outputs.",
)
_seed_opt = click.option(
    "--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True,
    help="Global seed; per-file noise seeds derive from it.",
)
_tol_opt = click.option(
    "--tolerance-ms", "tolerances_ms", callback=_parse_tolerances, default="20",
    show_default=True, help="Comma-separated matching tolerances in ms.",
)
_figures_opt = click.option(
    "--figures/--no-figures", default=True, show_default=True,
    help="Render figures next to the CSV/JSON reports.",
)
_corpus_arg = click.argument(
    "corpus_dir", required=False, envvar="STMSEG_CORPUS",
    type=click.Path(path_type=Path),
)


def _require_corpus(corpus_dir: Path | None) -> Path:
    if corpus_dir is None:
        raise click.UsageError(
            "no corpus directory given and STMSEG_CORPUS is not set"
        )
    return corpus_dir


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def cli() -> None:
    """Phone-boundary segmentation, degradation simulation, and scoring."""


@cli.command("segment")
@click.argument("wav_path", type=click.Path(path_type=Path))
@_features_opt
@click.option(
    "--postprocess", type=click.Choice(["on", "off"]), default="on",
    show_default=True, help="Floor the contour at its median before picking peaks.",
)
@click.option("--contour", is_flag=True, help="Also dump the contour as CSV.")
@_out_opt
def segment_command(wav_path, feature_kind, postprocess, contour, out_dir):
    """Detect phone boundaries in WAV_PATH; writes <stem>.bnd."""
    cfg = RunConfig(feature_kind=feature_kind, postprocess=postprocess, out_dir=out_dir)
    bnd = cmd_segment(wav_path, cfg, dump_contour=contour)
    click.echo(str(bnd))


@cli.group("degrade")
def degrade_group() -> None:
    """Write degraded copies of WAV files, with sidecar JSON metadata."""


def _expand_wavs(inputs: tuple[Path, ...]) -> list[Path]:
    wavs: list[Path] = []
    for p in inputs:
        if p.is_dir():
            wavs.extend(
                sorted(
                    q for q in p.rglob("*")
                    if q.is_file() and q.suffix.lower() == ".wav"
                )
            )
        else:
            wavs.append(p)
    if not wavs:
        raise click.UsageError("no input wav files")
    return wavs


def _write_sidecar(path: Path, meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


@degrade_group.command("clip")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option(
    "--percent", type=click.FloatRange(0, 100, min_open=True, max_open=True),
    required=True, help="Target percentage of samples to clip.",
)
@_out_opt
def degrade_clip_command(inputs, percent, out_dir):
    """Clip INPUTS (files or directories) at the percentile threshold."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for wav in _expand_wavs(inputs):
        audio = read_wav(wav)
        tau = clip_threshold(audio, ClipSpec(percent))
        out_wav = out_dir / f"{wav.stem}__clip{percent:g}.wav"
        write_wav(out_wav, clip_at(audio, tau))
        _write_sidecar(
            out_wav.with_suffix(".json"),
            {"kind": "clip", "percent": percent, "tau": tau},
        )
        click.echo(str(out_wav))


@degrade_group.command("noise")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--snr-db", type=float, required=True, help="Target SNR in dB.")
@_seed_opt
@click.option(
    "--headroom", type=click.FloatRange(0, 1, min_open=True), default=0.5,
    show_default=True, help="Peak-normalize to this level before adding noise.",
)
@_out_opt
def degrade_noise_command(inputs, snr_db, seed, headroom, out_dir):
    """Add white Gaussian noise to INPUTS at --snr-db."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for wav in _expand_wavs(inputs):
        audio = normalize_peak(read_wav(wav), headroom)
        per_file = file_seed(seed, wav.name)
        sigma = noise_sigma(audio, snr_db)
        out_wav = out_dir / f"{wav.stem}__snr{snr_db:g}.wav"
        write_wav(out_wav, apply_awgn(audio, NoiseSpec(snr_db, per_file)))
        _write_sidecar(
            out_wav.with_suffix(".json"),
            {"kind": "noise", "snr_db": snr_db, "sigma": sigma, "seed": per_file},
        )
        click.echo(str(out_wav))


@cli.command("evaluate")
@_corpus_arg
@_features_opt
@click.option(
    "--postprocess", type=click.Choice(["on", "off", "both"]), default="both",
    show_default=True, help="Which pipeline variants to score.",
)
@_tol_opt
@_out_opt
@_figures_opt
def evaluate_command(corpus_dir, feature_kind, postprocess, tolerances_ms, out_dir, figures):
    """Score detected boundaries against .phn references over a corpus."""
    cfg = RunConfig(
        feature_kind=feature_kind, postprocess=postprocess,
        tolerances_ms=tolerances_ms, out_dir=out_dir, figures=figures,
    )
    reports = cmd_evaluate(_require_corpus(corpus_dir), cfg)
    for variant in cfg.variants():
        for r in reports[variant]:
            click.echo(
                f"{variant} @ {r.tolerance_ms:g} ms: "
                f"P={r.precision_pct:.2f} R={r.recall_pct:.2f} F={r.fscore_pct:.2f}"
            )


@cli.command("sweep")
@_corpus_arg
@_features_opt
@click.option(
    "--postprocess", type=click.Choice(["on", "off", "both"]), default="both",
    show_default=True, help="Which pipeline variants to score.",
)
@_tol_opt
@click.option(
    "--clip-percents", callback=_parse_float_list, default="10,30,50,70,90",
    show_default=True, help="Comma-separated clipping grid.",
)
@click.option(
    "--snr-dbs", callback=_parse_float_list, default="0,5,10,15,20",
    show_default=True, help="Comma-separated SNR grid in dB.",
)
@_seed_opt
@click.option(
    "--headroom", type=click.FloatRange(0, 1, min_open=True), default=0.5,
    show_default=True, help="Peak-normalize to this level before adding noise.",
)
@_out_opt
@_figures_opt
def sweep_command(
    corpus_dir, feature_kind, postprocess, tolerances_ms, clip_percents,
    snr_dbs, seed, headroom, out_dir, figures,
):
    """Evaluate the corpus clean and under every degradation grid cell."""
    cfg = RunConfig(
        feature_kind=feature_kind, postprocess=postprocess,
        tolerances_ms=tolerances_ms, seed=seed, headroom=headroom,
        clip_percents=clip_percents, snr_dbs=snr_dbs,
        out_dir=out_dir, figures=figures,
    )
    click.echo(str(cmd_sweep(_require_corpus(corpus_dir), cfg)))


def main(argv=None) -> int:
    """Entry point mapping errors onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 130
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except (FormatError, TooShortSignalError, DegenerateSignalError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 4
    except ParameterError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
